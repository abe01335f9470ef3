use std::collections::BTreeMap;

use serde::Serialize;

use super::rect::{Point, Rect};
use crate::error::{Error, Result};

/// Guard against combinatorial blowup of the compressed grid.
pub const MAX_DISTINCT_RECTS: usize = 20;

/// An atomic region of the field: every point in it has the same in/out
/// relation to every community of every period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioCell {
    pub area: f64,
    /// `membership[t][j]` is true when the cell lies inside community `j` of period `t`.
    pub membership: Vec<Vec<bool>>,
}

impl ScenarioCell {
    pub fn inside(&self, period: usize, community: usize) -> bool {
        self.membership[period][community]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Arrangement {
    pub field_area: f64,
    pub cells: Vec<ScenarioCell>,
}

impl Arrangement {
    /// Probability that a uniformly placed target falls in `cell`.
    pub fn probability(&self, cell: &ScenarioCell) -> f64 {
        cell.area / self.field_area
    }

    /// Area of the field lying inside community `j` of period `t`.
    pub fn marginal_area(&self, period: usize, community: usize) -> f64 {
        self.cells
            .iter()
            .filter(|c| c.inside(period, community))
            .map(|c| c.area)
            .sum()
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }
}

/// Builds the joint (all periods) arrangement of `communities[t][j]` over the
/// field `[0, field_edge]^2` by coordinate compression.
pub fn build_arrangement(communities: &[Vec<Rect>], field_edge: f64) -> Result<Arrangement> {
    if !(field_edge > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "field edge must be positive, got {field_edge}"
        )));
    }
    let field = Rect::square(0.0, 0.0, field_edge);

    let mut distinct: Vec<Rect> = Vec::new();
    for r in communities.iter().flatten() {
        if !distinct.contains(r) {
            distinct.push(*r);
        }
    }
    if distinct.len() > MAX_DISTINCT_RECTS {
        return Err(Error::TooManyRects {
            count: distinct.len(),
            limit: MAX_DISTINCT_RECTS,
        });
    }

    let clip = |v: f64| v.clamp(0.0, field_edge);
    let mut xs = vec![0.0, field_edge];
    let mut ys = vec![0.0, field_edge];
    for r in &distinct {
        xs.extend([clip(r.x0), clip(r.x1)]);
        ys.extend([clip(r.y0), clip(r.y1)]);
    }
    for v in [&mut xs, &mut ys] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }

    let mut merged: BTreeMap<Vec<Vec<bool>>, f64> = BTreeMap::new();
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            let area = (xw[1] - xw[0]) * (yw[1] - yw[0]);
            if area <= 0.0 {
                continue;
            }
            let mid = Point::new(0.5 * (xw[0] + xw[1]), 0.5 * (yw[0] + yw[1]));
            debug_assert!(field.contains(mid));
            let membership: Vec<Vec<bool>> = communities
                .iter()
                .map(|period| period.iter().map(|r| r.contains(mid)).collect())
                .collect();
            *merged.entry(membership).or_insert(0.0) += area;
        }
    }

    Ok(Arrangement {
        field_area: field.area(),
        cells: merged
            .into_iter()
            .map(|(membership, area)| ScenarioCell { area, membership })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_community() {
        let arr = build_arrangement(&[vec![Rect::square(0.0, 0.0, 100.0)]], 1000.0).unwrap();
        assert_eq!(arr.cells.len(), 2);
        let inside = arr.cells.iter().find(|c| c.inside(0, 0)).unwrap();
        let outside = arr.cells.iter().find(|c| !c.inside(0, 0)).unwrap();
        assert_eq!(inside.area, 1.0e4);
        assert_eq!(outside.area, 99.0e4);
        assert!((arr.probability(inside) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn two_overlapping_squares() {
        let arr = build_arrangement(
            &[vec![Rect::square(0.0, 0.0, 100.0), Rect::square(50.0, 50.0, 100.0)]],
            1000.0,
        )
        .unwrap();
        assert_eq!(arr.cells.len(), 4);
        assert!((arr.total_area() - 1.0e6).abs() < 1e-6);
        let both = arr.cells.iter().find(|c| c.inside(0, 0) && c.inside(0, 1)).unwrap();
        assert_eq!(both.area, 2500.0);
    }

    /// Model 2 layout: 200 m local square in period 1 and a nested 50 m one
    /// in period 2, both centred; marginals checked against a brute-force
    /// count of integer grid points.
    #[test]
    fn nested_layout_matches_grid_count() {
        let field = Rect::square(0.0, 0.0, 1000.0);
        let p1 = Rect::square(400.0, 400.0, 200.0);
        let p2 = Rect::square(475.0, 475.0, 50.0);
        let arr = build_arrangement(&[vec![p1, field], vec![p2, field]], 1000.0).unwrap();

        let count = |r: &Rect| {
            let mut n = 0u64;
            for i in 0..1000 {
                for j in 0..1000 {
                    // cell centres avoid boundary ambiguity
                    if r.contains(Point::new(i as f64 + 0.5, j as f64 + 0.5)) {
                        n += 1;
                    }
                }
            }
            n as f64 / 1.0e6
        };
        let brute1 = count(&p1);
        let brute2 = count(&p2);
        assert_eq!(brute1, 0.04);
        assert_eq!(brute2, 0.0025);
        assert_eq!(arr.marginal_area(0, 0) / arr.field_area, brute1);
        assert_eq!(arr.marginal_area(1, 0) / arr.field_area, brute2);
        assert_eq!(arr.marginal_area(0, 1), 1.0e6);
    }

    #[test]
    fn rejects_too_many_rects() {
        let rects: Vec<Rect> = (0..21).map(|i| Rect::square(i as f64 * 10.0, 0.0, 5.0)).collect();
        assert!(matches!(
            build_arrangement(&[rects], 1000.0),
            Err(Error::TooManyRects { count: 21, .. })
        ));
    }

    proptest! {
        #[test]
        fn area_conservation_and_marginals(
            raw in prop::collection::vec((0.0..900.0f64, 0.0..900.0f64, 10.0..100.0f64), 1..6),
            split in 0usize..6,
        ) {
            let rects: Vec<Rect> = raw.iter().map(|&(x, y, c)| Rect::square(x, y, c)).collect();
            let k = split.min(rects.len());
            let periods = vec![rects[..k].to_vec(), rects[k..].to_vec()];
            let arr = build_arrangement(&periods, 1000.0).unwrap();
            prop_assert!((arr.total_area() - 1.0e6).abs() <= 1e-6 * 1.0e6);
            for (t, period) in periods.iter().enumerate() {
                for (j, r) in period.iter().enumerate() {
                    let expected = super::super::intersection_area(r, &Rect::square(0.0, 0.0, 1000.0));
                    prop_assert!((arr.marginal_area(t, j) - expected).abs() <= 1e-6 * expected.max(1.0));
                }
            }
            for (i, a) in arr.cells.iter().enumerate() {
                prop_assert!(a.area > 0.0);
                for b in &arr.cells[i + 1..] {
                    prop_assert_ne!(&a.membership, &b.membership);
                }
            }
        }
    }
}

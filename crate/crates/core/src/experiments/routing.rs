use rand::Rng;
use serde::Serialize;

use crate::analytics::{pair_degree, OccupancyView};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::model::Document;
use crate::rng;
use crate::simulator::{RunSpec, Snapshots};

/// Greedy geographic forwarding on one snapshot. The packet enters at the
/// on-node nearest `src` within `k` and moves to the neighbour closest to
/// `dst` while that neighbour is strictly closer than the current holder.
pub fn greedy_route(positions: &[Point], on: &[bool], k: f64, src: Point, dst: Point) -> bool {
    let live: Vec<usize> = (0..positions.len()).filter(|i| on[*i]).collect();
    let Some(&start) = live
        .iter()
        .filter(|i| positions[**i].distance(src) <= k)
        .min_by(|a, b| positions[**a].distance(src).total_cmp(&positions[**b].distance(src)))
    else {
        return false;
    };
    let mut current = start;
    loop {
        let here = positions[current].distance(dst);
        if here <= k {
            return true;
        }
        let next = live
            .iter()
            .filter(|j| positions[**j].distance(positions[current]) <= k)
            .min_by(|a, b| positions[**a].distance(dst).total_cmp(&positions[**b].distance(dst)));
        match next {
            Some(&j) if positions[j].distance(dst) < here => current = j,
            _ => return false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutingResult {
    pub range: f64,
    pub trials: usize,
    pub successes: usize,
}

impl RoutingResult {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Uniform snapshot instants in `[0, duration]`, ascending.
pub fn snapshot_times(run: &RunSpec, trials: usize) -> Vec<f64> {
    let mut r = rng::stream(run.seed, rng::AUX_SPACE | 0x726f);
    let mut times: Vec<f64> = (0..trials).map(|_| r.random::<f64>() * run.duration).collect();
    times.sort_by(f64::total_cmp);
    times
}

/// Success rate of greedy forwarding from `src` to `dst` over `trials`
/// random snapshots of the run, evaluated for every range in `ranges` on
/// the same snapshots.
pub fn greedy_forwarding_success(run: &RunSpec, ranges: &[f64], src: Point, dst: Point, trials: usize) -> Result<Vec<RoutingResult>> {
    run.validate()?;
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut successes = vec![0usize; ranges.len()];
    let mut snaps = Snapshots::new(run);
    for t in snapshot_times(run, trials) {
        let snap = snaps.at(t);
        for (r, k) in ranges.iter().enumerate() {
            if greedy_route(&snap.positions, &snap.on, *k, src, dst) {
                successes[r] += 1;
            }
        }
    }
    Ok(ranges
        .iter()
        .zip(successes)
        .map(|(k, s)| RoutingResult { range: *k, trials, successes: s })
        .collect())
}

/// Groups of statistically identical nodes, with their population shares.
#[derive(Debug, Clone)]
pub struct Population {
    pub groups: Vec<(OccupancyView, f64)>,
}

impl Population {
    /// One group per node template, weighted by its `count`. Templates with
    /// random placement are rejected: their degree depends on the draw.
    pub fn from_document(doc: &Document) -> Result<Self> {
        if doc.is_randomized() {
            return Err(Error::InvalidArgument("population templates need fixed community placement".into()));
        }
        let total = doc.node_count() as f64;
        let mut groups = Vec::new();
        for t in &doc.nodes {
            let single = Document {
                nodes: vec![crate::model::NodeTemplate { count: None, ..t.clone() }],
                ..doc.clone()
            };
            let profile = single.instantiate(0)?.remove(0);
            groups.push((OccupancyView::from_profile(&profile), t.instances() as f64 / total));
        }
        Ok(Population { groups })
    }

    /// Mean degree with `m` nodes is `a m - b`; returns `(a, b)`.
    pub fn degree_coefficients(&self, k: f64) -> Result<(f64, f64)> {
        let (mut a, mut b) = (0.0, 0.0);
        for (g, (vg, sg)) in self.groups.iter().enumerate() {
            for (h, (vh, sh)) in self.groups.iter().enumerate() {
                let d = pair_degree(vg, vh, k)?;
                a += sg * sh * d;
                if g == h {
                    b += sg * d;
                }
            }
        }
        Ok((a, b))
    }

    /// Network-average expected degree with `m` nodes split by share.
    pub fn mean_degree(&self, m: f64, k: f64) -> Result<f64> {
        let (a, b) = self.degree_coefficients(k)?;
        Ok(a * m - b)
    }
}

/// Smallest population reaching `reference_degree` under the target
/// template, at range `k`. At least one node is always returned.
pub fn nodes_needed(target: &Population, reference_degree: f64, k: f64) -> Result<usize> {
    if !(reference_degree > 0.0) {
        return Ok(1);
    }
    let (a, b) = target.degree_coefficients(k)?;
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("target population has zero degree at any size".into()));
    }
    let m = (reference_degree + b) / a;
    // guard against rounding just above an integer
    Ok(((m - 1e-9 * m.abs().max(1.0)).ceil() as usize).max(1))
}

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{intersection_area, Rect};
use crate::model::FieldSpec;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapEstimate {
    pub p_overlap: f64,
    pub p_overlap_stderr: f64,
    /// Mean overlap area given that the communities overlap.
    pub mean_area: f64,
    pub mean_area_stderr: f64,
}

/// Monte Carlo overlap statistics of two squares of edges `c_a` and `c_b`
/// placed independently and uniformly inside the field.
pub fn estimate_overlap_probability(c_a: f64, c_b: f64, field: &FieldSpec, samples: usize, seed: u64) -> Result<OverlapEstimate> {
    let n = field.edge_length;
    for c in [c_a, c_b] {
        if !(c > 0.0 && c <= n) {
            return Err(Error::InvalidArgument(format!("community edge {c} must lie in (0, {n}]")));
        }
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let mut r = rng::stream(seed, rng::AUX_SPACE | 0x6f76);
    let mut hits = 0usize;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let a = Rect::square(r.random::<f64>() * (n - c_a), r.random::<f64>() * (n - c_a), c_a);
        let b = Rect::square(r.random::<f64>() * (n - c_b), r.random::<f64>() * (n - c_b), c_b);
        let area = intersection_area(&a, &b);
        if area > 0.0 {
            hits += 1;
            sum += area;
            sum_sq += area * area;
        }
    }
    let s = samples as f64;
    let p = hits as f64 / s;
    let (mean_area, mean_area_stderr) = if hits > 0 {
        let h = hits as f64;
        let m = sum / h;
        let var = if hits > 1 { (sum_sq / h - m * m).max(0.0) * h / (h - 1.0) } else { 0.0 };
        (m, (var / h).sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(OverlapEstimate {
        p_overlap: p,
        p_overlap_stderr: (p * (1.0 - p) / s).sqrt(),
        mean_area,
        mean_area_stderr,
    })
}

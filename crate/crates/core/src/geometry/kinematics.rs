use std::f64::consts::TAU;

use rand::Rng;
use serde::Serialize;

use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinematicConstants {
    /// Mean of the uniform speed distribution.
    pub mean_speed: f64,
    /// `E|v1 - v2| / mean_speed` for two independent random-direction movers.
    pub relative_factor: f64,
    /// Monte Carlo standard error of `relative_factor`.
    pub stderr: f64,
}

/// Monte Carlo estimate of the mean relative speed of two nodes whose speeds
/// are drawn from `a` and `b` and whose headings are independent and uniform.
/// Returns `(mean, stderr)`.
pub fn mean_relative_speed(a: (f64, f64), b: (f64, f64), samples: usize, seed: u64) -> (f64, f64) {
    assert!(samples > 1, "need at least two samples");
    let mut r = rng::stream(seed, rng::AUX_SPACE | 0x5eed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        let v1 = uniform(&mut r, a);
        let v2 = uniform(&mut r, b);
        let dtheta = r.random::<f64>() * TAU;
        let rel = (v1 * v1 + v2 * v2 - 2.0 * v1 * v2 * dtheta.cos()).max(0.0).sqrt();
        sum += rel;
        sum_sq += rel * rel;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn uniform<R: Rng>(r: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        r.random_range(lo..hi)
    } else {
        lo
    }
}

/// The relative-speed multiplier for two nodes sharing the speed range
/// `[v_min, v_max]`.
pub fn relative_speed_factor(v_min: f64, v_max: f64, samples: usize, seed: u64) -> KinematicConstants {
    let mean_speed = 0.5 * (v_min + v_max);
    let (mean, se) = mean_relative_speed((v_min, v_max), (v_min, v_max), samples, seed);
    KinematicConstants {
        mean_speed,
        relative_factor: mean / mean_speed,
        stderr: se / mean_speed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn equal_speeds_give_four_over_pi() {
        let k = relative_speed_factor(10.0, 10.0, 1_000_000, 11);
        let exact = 4.0 / PI;
        assert!(
            (k.relative_factor - exact).abs() < 3.0 * k.stderr,
            "{} vs {exact} (se {})",
            k.relative_factor,
            k.stderr
        );
    }

    #[test]
    fn table_speed_range_baseline() {
        let k = relative_speed_factor(5.0, 15.0, 1_000_000, 11);
        assert!(k.relative_factor > 1.27 && k.relative_factor < 1.35, "{}", k.relative_factor);
        // Triple quadrature over (v1, v2, dtheta) gives 1.332614.
        assert!((k.relative_factor - 1.332614).abs() < 3.0 * k.stderr, "{}", k.relative_factor);
        assert!(k.relative_factor >= 1.0);
    }

    #[test]
    fn one_static_node_gives_partner_speed() {
        let (mean, se) = mean_relative_speed((0.0, 0.0), (10.0, 10.0), 10_000, 3);
        assert!((mean - 10.0).abs() < 1e-9 && se < 1e-9);
    }
}

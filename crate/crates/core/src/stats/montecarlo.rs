use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::model::NodeProfile;
use crate::rng;
use crate::simulator::{NodeMobility, Phase, Segment};

/// Cap used when the analytic prediction is infinite.
pub const DEFAULT_TIMEOUT: f64 = 1.0e8;

/// Per-iteration cap: a hundred times the prediction when it is finite.
pub fn timeout_cap(analytic: f64) -> f64 {
    if analytic.is_finite() && analytic > 0.0 {
        100.0 * analytic
    } else {
        DEFAULT_TIMEOUT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Completed iterations.
    pub iterations: usize,
    /// Iterations stopped at the cap, excluded from the mean.
    pub timeouts: usize,
    pub samples: Vec<f64>,
}

impl McEstimate {
    pub fn from_samples(results: Vec<Option<f64>>) -> Self {
        let timeouts = results.iter().filter(|r| r.is_none()).count();
        let samples: Vec<f64> = results.into_iter().flatten().collect();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n.max(1.0);
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        McEstimate {
            mean,
            stderr: (var / n.max(1.0)).sqrt(),
            iterations: samples.len(),
            timeouts,
            samples,
        }
    }

    pub fn relative_stderr(&self) -> f64 {
        self.stderr / self.mean
    }
}

/// Earliest `s` in `[0, len]` with `|r0 + w s| <= k`, for a linear relative motion.
fn first_within(r0: Point, w: (f64, f64), len: f64, k: f64) -> Option<f64> {
    let c = r0.x * r0.x + r0.y * r0.y - k * k;
    if c <= 0.0 {
        return Some(0.0);
    }
    let a = w.0 * w.0 + w.1 * w.1;
    if a == 0.0 {
        return None;
    }
    let b = 2.0 * (r0.x * w.0 + r0.y * w.1);
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    // c > 0, so both roots share a sign and the smaller is the entry time
    let s = (-b - disc.sqrt()) / (2.0 * a);
    (s >= 0.0 && s <= len).then_some(s)
}

/// First time an on-segment of the stream passes within `k` of `target`.
pub fn first_hit(segments: impl Iterator<Item = Segment>, target: Point, k: f64, cap: f64) -> Option<f64> {
    for s in segments {
        if s.t0 > cap {
            return None;
        }
        if !s.on {
            continue;
        }
        let r0 = Point::new(s.start.x - target.x, s.start.y - target.y);
        if let Some(dt) = first_within(r0, (s.vx, s.vy), s.duration(), k) {
            let t = s.t0 + dt;
            return (t <= cap).then_some(t);
        }
    }
    None
}

/// First time two nodes, both on, are within `k`.
pub fn first_meeting(
    mut a: impl Iterator<Item = Segment>,
    mut b: impl Iterator<Item = Segment>,
    k: f64,
    cap: f64,
) -> Option<f64> {
    let mut sa = a.next()?;
    let mut sb = b.next()?;
    loop {
        let t0 = sa.t0.max(sb.t0);
        if t0 > cap {
            return None;
        }
        let t1 = sa.t1.min(sb.t1);
        if sa.on && sb.on && t1 >= t0 {
            let pa = sa.position(t0);
            let pb = sb.position(t0);
            let r0 = Point::new(pa.x - pb.x, pa.y - pb.y);
            if let Some(dt) = first_within(r0, (sa.vx - sb.vx, sa.vy - sb.vy), t1 - t0, k) {
                let t = t0 + dt;
                return (t <= cap).then_some(t);
            }
        }
        if sa.t1 <= sb.t1 {
            sa = a.next()?;
        } else {
            sb = b.next()?;
        }
    }
}

fn check_iterations(iterations: usize) -> Result<()> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("need at least one iteration".into()));
    }
    Ok(())
}

/// Hitting time of a uniformly placed target, one fresh seed per iteration.
pub fn empirical_hitting_time(profile: &NodeProfile, k: f64, iterations: usize, seed: u64, cap: f64) -> Result<McEstimate> {
    check_iterations(iterations)?;
    let results: Vec<Option<f64>> = (0..iterations as u64)
        .into_par_iter()
        .map(|i| {
            let s = rng::iteration_seed(seed, i);
            let mut aux = rng::stream(s, rng::AUX_SPACE);
            let target = profile.field.rect().lerp(aux.random(), aux.random());
            first_hit(NodeMobility::new(profile, s, 0), target, k, cap)
        })
        .collect();
    Ok(McEstimate::from_samples(results))
}

/// Meeting time of two independently started nodes.
pub fn empirical_meeting_time(a: &NodeProfile, b: &NodeProfile, k: f64, iterations: usize, seed: u64, cap: f64) -> Result<McEstimate> {
    check_iterations(iterations)?;
    let results: Vec<Option<f64>> = (0..iterations as u64)
        .into_par_iter()
        .map(|i| {
            let s = rng::iteration_seed(seed, i);
            first_meeting(NodeMobility::new(a, s, 0), NodeMobility::new(b, s, 1), k, cap)
        })
        .collect();
    Ok(McEstimate::from_samples(results))
}

/// Measured time shares of one period's epochs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseFractions {
    pub period: usize,
    pub p_move: Vec<f64>,
    pub p_pause: Vec<f64>,
    pub p_tr: f64,
    /// Standard errors over cycles, same layout.
    pub p_move_stderr: Vec<f64>,
    pub p_pause_stderr: Vec<f64>,
    pub p_tr_stderr: f64,
    /// Total time governed by this period's parameters.
    pub time: f64,
}

/// Long-run time shares of moving, pausing and transit, attributed to the
/// period whose parameters drew each epoch. Means and standard errors are
/// taken over whole cycles.
pub fn phase_fractions(profile: &NodeProfile, horizon: f64, seed: u64) -> Result<Vec<PhaseFractions>> {
    let cycle = profile.cycle_duration();
    let cycles = (horizon / cycle).floor() as usize;
    if cycles < 2 {
        return Err(Error::InvalidArgument(format!("horizon {horizon} s covers fewer than two cycles")));
    }
    let v = profile.schedule.len();
    // per cycle, per period: [move..., pause..., transit]
    let width: Vec<usize> = profile.schedule.iter().map(|p| 2 * p.len() + 1).collect();
    let mut time: Vec<Vec<Vec<f64>>> = (0..cycles).map(|_| width.iter().map(|w| vec![0.0; *w]).collect()).collect();
    let end = cycles as f64 * cycle;
    for seg in NodeMobility::new(profile, seed, 0) {
        if seg.t0 >= end {
            break;
        }
        // split at cycle boundaries
        let mut t = seg.t0;
        while t < seg.t1.min(end) {
            let c = ((t / cycle).floor() as usize).min(cycles - 1);
            let stop = seg.t1.min(((c + 1) as f64) * cycle).min(end);
            let s = profile.schedule[seg.period].len();
            let slot = match seg.phase {
                Phase::Moving => seg.community,
                Phase::Paused => s + seg.community,
                Phase::Transitional => 2 * s,
            };
            time[c][seg.period][slot] += stop - t;
            t = stop;
        }
    }
    let mut out = Vec::with_capacity(v);
    for t in 0..v {
        let s = profile.schedule[t].len();
        let shares: Vec<Vec<f64>> = time
            .iter()
            .filter_map(|per| {
                let total: f64 = per[t].iter().sum();
                (total > 0.0).then(|| per[t].iter().map(|x| x / total).collect())
            })
            .collect();
        let n = shares.len() as f64;
        let mean = |slot: usize| shares.iter().map(|r| r[slot]).sum::<f64>() / n;
        let se = |slot: usize| {
            let m = mean(slot);
            let var = shares.iter().map(|r| (r[slot] - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            (var / n).sqrt()
        };
        out.push(PhaseFractions {
            period: t,
            p_move: (0..s).map(mean).collect(),
            p_pause: (s..2 * s).map(mean).collect(),
            p_tr: mean(2 * s),
            p_move_stderr: (0..s).map(se).collect(),
            p_pause_stderr: (s..2 * s).map(se).collect(),
            p_tr_stderr: se(2 * s),
            time: time.iter().map(|per| per[t].iter().sum::<f64>()).sum(),
        });
    }
    Ok(out)
}

use rand::Rng;
use rayon::prelude::*;

use super::si::EpidemicCurve;
use crate::error::{Error, Result};
use crate::rng;
use crate::simulator::{RunSpec, Snapshots};

/// Mean infected count over `trials` replications of epidemic flooding.
/// Each trial regenerates the trace from its own seed; at every sample an
/// infected node passes the packet to every on-node within `k` (one hop
/// per sample). With `source` unset, each trial picks a random source.
pub fn epidemic_simulate(run: &RunSpec, k: f64, source: Option<usize>, trials: usize) -> Result<EpidemicCurve> {
    run.validate()?;
    let m = run.profiles.len();
    if m == 0 || trials == 0 {
        return Err(Error::InvalidArgument("need at least one node and one trial".into()));
    }
    if let Some(s) = source.filter(|s| *s >= m) {
        return Err(Error::InvalidArgument(format!("source {s} out of range for {m} nodes")));
    }
    let samples = run.sample_count();
    let curves: Vec<Vec<u32>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let seed = rng::iteration_seed(run.seed, trial);
            let src = source.unwrap_or_else(|| rng::stream(seed, rng::AUX_SPACE).random_range(0..m));
            let trial_run = RunSpec { seed, ..run.clone() };
            flood(&trial_run, k, src, samples)
        })
        .collect();
    let times = (0..samples).map(|s| s as f64 * run.dt).collect();
    let infected = (0..samples)
        .map(|s| curves.iter().map(|c| c[s] as f64).sum::<f64>() / trials as f64)
        .collect();
    Ok(EpidemicCurve { times, infected, groups: Vec::new() })
}

fn flood(run: &RunSpec, k: f64, src: usize, samples: usize) -> Vec<u32> {
    let m = run.profiles.len();
    let k2 = k * k;
    let mut infected = vec![false; m];
    infected[src] = true;
    let mut count = 1u32;
    let mut out = Vec::with_capacity(samples);
    let mut snaps = Snapshots::new(run);
    for s in 0..samples {
        if count as usize == m {
            out.resize(samples, count);
            break;
        }
        let snap = snaps.at(s as f64 * run.dt);
        let carriers: Vec<usize> = (0..m).filter(|i| infected[*i] && snap.on[*i]).collect();
        for j in 0..m {
            if infected[j] || !snap.on[j] {
                continue;
            }
            let p = snap.positions[j];
            if carriers.iter().any(|i| {
                let q = snap.positions[*i];
                let (dx, dy) = (p.x - q.x, p.y - q.y);
                dx * dx + dy * dy <= k2
            }) {
                infected[j] = true;
                count += 1;
            }
        }
        out.push(count);
    }
    out
}

/// Time-averaged unit meeting probability between every pair of views,
/// for use as SI contact rates.
pub fn contact_rates(views: &[&crate::analytics::OccupancyView], k: f64) -> Result<Vec<Vec<f64>>> {
    use crate::analytics::{align, unit_meeting_probability};
    let mut beta = vec![vec![0.0; views.len()]; views.len()];
    for i in 0..views.len() {
        for j in i..views.len() {
            let intervals = align(&[views[i], views[j]])?;
            let cycle = views[i].cycle_duration();
            let b: f64 = intervals
                .iter()
                .map(|iv| iv.duration / cycle * unit_meeting_probability(&views[i].periods[iv.periods[0]], &views[j].periods[iv.periods[1]], k))
                .sum();
            beta[i][j] = b;
            beta[j][i] = b;
        }
    }
    Ok(beta)
}

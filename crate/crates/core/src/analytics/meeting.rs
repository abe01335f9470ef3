use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use super::hitting::{cycle_event, InPeriodWait, PeriodEvent};
use super::view::{align, Interval, OccupancyView, PeriodView};
use crate::error::{Error, Result};
use crate::geometry::{intersection_area, mean_relative_speed};
use crate::model::SpeedRange;

pub const RELATIVE_SPEED_SAMPLES: usize = 1_000_000;
const RELATIVE_SPEED_SEED: u64 = 0x0076_7061_6972;

type SpeedKey = [u64; 4];

fn cache() -> &'static Mutex<HashMap<SpeedKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<SpeedKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Mean magnitude of the velocity difference of two nodes moving in
/// independent uniform directions with speeds uniform on the given ranges.
/// Estimated once per pair of ranges and cached.
pub fn mean_relative_speed_of(a: SpeedRange, b: SpeedRange) -> f64 {
    let (a, b) = if (a.min, a.max) <= (b.min, b.max) { (a, b) } else { (b, a) };
    let key = [a.min.to_bits(), a.max.to_bits(), b.min.to_bits(), b.max.to_bits()];
    if let Some(v) = cache().lock().expect("cache lock").get(&key) {
        return *v;
    }
    let (mean, _) = mean_relative_speed((a.min, a.max), (b.min, b.max), RELATIVE_SPEED_SAMPLES, RELATIVE_SPEED_SEED);
    cache().lock().expect("cache lock").insert(key, mean);
    mean
}

/// Per-second chance that two nodes come within `k`, summed over every
/// pair of overlapping community states. Transitional time is left out.
pub fn unit_meeting_probability(a: &PeriodView, b: &PeriodView, k: f64) -> f64 {
    let mut p = 0.0;
    for sa in &a.states {
        for sb in &b.states {
            let overlap = intersection_area(&sa.rect, &sb.rect);
            if overlap == 0.0 {
                continue;
            }
            let shape = 2.0 * k * overlap / (sa.area() * sb.area());
            let both = if sa.p_move > 0.0 && sb.p_move > 0.0 {
                sa.p_move * sb.p_move * mean_relative_speed_of(sa.speed, sb.speed)
            } else {
                0.0
            };
            let a_moves = sa.p_move * sb.p_pause * sa.mean_speed();
            let b_moves = sa.p_pause * sb.p_move * sb.mean_speed();
            p += shape * (both + a_moves + b_moves);
        }
    }
    p
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeetingReport {
    pub a: String,
    pub b: String,
    pub wait: InPeriodWait,
    pub range: f64,
    pub mt: f64,
    /// Meeting probability per cycle.
    pub q: f64,
    pub intervals: Vec<Interval>,
    /// Per aligned interval: unit and period meeting probabilities.
    pub periods: Vec<PeriodEvent>,
    pub warnings: Vec<String>,
}

impl MeetingReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("interval,duration,p_m,p_M,first_share,conditional_mt,q,mt\n");
        for (i, p) in self.periods.iter().enumerate() {
            s.push_str(&format!(
                "{i},{},{},{},{},{},{},{}\n",
                p.duration, p.unit, p.period, p.first_share, p.conditional_time, self.q, self.mt
            ));
        }
        s
    }
}

/// Expected time until two nodes with fixed communities first meet.
pub fn meeting_time(a: &OccupancyView, b: &OccupancyView, k: f64) -> Result<MeetingReport> {
    meeting_time_with(a, b, k, InPeriodWait::Geometric)
}

pub fn meeting_time_with(a: &OccupancyView, b: &OccupancyView, k: f64, wait: InPeriodWait) -> Result<MeetingReport> {
    if !(k > 0.0) {
        return Err(Error::InvalidArgument(format!("transmission range must be positive, got {k}")));
    }
    let intervals = align(&[a, b])?;
    let unit: Vec<f64> = intervals
        .iter()
        .map(|iv| unit_meeting_probability(&a.periods[iv.periods[0]], &b.periods[iv.periods[1]], k))
        .collect();
    let durations: Vec<f64> = intervals.iter().map(|iv| iv.duration).collect();
    let event = cycle_event(&durations, &unit, wait);
    if event.cycle == 0.0 {
        return Err(Error::NoMeetingPossible);
    }
    let warnings = unit
        .iter()
        .zip(&durations)
        .enumerate()
        .filter(|(_, (u, d))| wait == InPeriodWait::Geometric && **u > 0.0 && **u * **d < 1.0)
        .map(|(i, (u, d))| format!("interval {i}: unit meeting probability {u:.3e} times duration {d} is below 1, the in-period wait is approximate"))
        .collect();
    Ok(MeetingReport {
        a: a.id.clone(),
        b: b.id.clone(),
        wait,
        range: k,
        mt: event.expected_time,
        q: event.cycle,
        intervals,
        periods: event.periods,
        warnings,
    })
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::model::{state_probabilities, FieldSpec, NodeProfile, SpeedRange};

/// Time shares of one community state within a period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateView {
    pub id: String,
    pub rect: Rect,
    pub p_move: f64,
    pub p_pause: f64,
    pub speed: SpeedRange,
}

impl StateView {
    pub fn p_state(&self) -> f64 {
        self.p_move + self.p_pause
    }

    pub fn mean_speed(&self) -> f64 {
        self.speed.mean()
    }

    pub fn area(&self) -> f64 {
        self.rect.area()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodView {
    pub duration: f64,
    pub states: Vec<StateView>,
    /// Share of time in transitional epochs.
    pub p_tr: f64,
}

/// What the closed forms need to know about a node: per period, where it
/// spends its time and how fast it moves there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancyView {
    pub id: String,
    pub field: FieldSpec,
    pub periods: Vec<PeriodView>,
}

impl OccupancyView {
    pub fn from_profile(profile: &NodeProfile) -> Self {
        let periods = profile
            .schedule
            .iter()
            .enumerate()
            .map(|(t, period)| {
                let sp = state_probabilities(profile, t);
                PeriodView {
                    duration: period.duration,
                    states: period
                        .communities
                        .iter()
                        .enumerate()
                        .map(|(j, c)| StateView {
                            id: c.community.id.clone(),
                            rect: c.community.rect(),
                            p_move: sp.p_move[j],
                            p_pause: sp.p_pause[j],
                            speed: c.speed,
                        })
                        .collect(),
                    p_tr: sp.p_tr,
                }
            })
            .collect();
        OccupancyView {
            id: profile.id.clone(),
            field: profile.field,
            periods,
        }
    }

    /// A node that never moves, at a uniformly random point of the field.
    pub fn stationary_point(id: impl Into<String>, field: FieldSpec, durations: &[f64]) -> Self {
        let state = StateView {
            id: "field".into(),
            rect: field.rect(),
            p_move: 0.0,
            p_pause: 1.0,
            speed: SpeedRange::new(1.0, 1.0),
        };
        OccupancyView {
            id: id.into(),
            field,
            periods: durations
                .iter()
                .map(|d| PeriodView {
                    duration: *d,
                    states: vec![state.clone()],
                    p_tr: 0.0,
                })
                .collect(),
        }
    }

    pub fn cycle_duration(&self) -> f64 {
        self.periods.iter().map(|p| p.duration).sum()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.periods.iter().map(|p| p.duration).collect()
    }
}

/// A stretch of the common cycle during which every node stays in one period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub duration: f64,
    /// Period index of each view.
    pub periods: Vec<usize>,
}

/// Splits the shared cycle at every node's period boundaries.
pub fn align(views: &[&OccupancyView]) -> Result<Vec<Interval>> {
    let Some(first) = views.first() else {
        return Ok(Vec::new());
    };
    let cycle = first.cycle_duration();
    for v in views {
        if (v.cycle_duration() - cycle).abs() > 1e-9 * cycle {
            return Err(Error::ScheduleMismatch(format!(
                "node {} has cycle {} s, node {} has {} s",
                first.id,
                cycle,
                v.id,
                v.cycle_duration()
            )));
        }
        if v.field != first.field {
            return Err(Error::ScheduleMismatch(format!("nodes {} and {} use different fields", first.id, v.id)));
        }
    }
    let starts = |v: &OccupancyView| -> Vec<f64> {
        let mut acc = 0.0;
        v.periods
            .iter()
            .map(|p| {
                let s = acc;
                acc += p.duration;
                s
            })
            .collect()
    };
    let mut cuts: Vec<f64> = views.iter().flat_map(|v| starts(v)).collect();
    cuts.push(cycle);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * cycle);
    let all_starts: Vec<Vec<f64>> = views.iter().map(|v| starts(v)).collect();
    Ok(cuts
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            Interval {
                duration: w[1] - w[0],
                periods: all_starts.iter().map(|s| s.iter().rposition(|x| *x <= mid).unwrap_or(0)).collect(),
            }
        })
        .collect())
}

//! Node profiles, configuration loading and state-occupancy probabilities.

mod config;
mod markov;
mod occupancy;
pub mod presets;

pub use config::{load_and_validate, parse_document, CommunityTemplate, Document, NodeTemplate, PeriodTemplate, Placement};
pub use markov::stationary_distribution;
pub use occupancy::{
    expected_transitional_length, occupancy_from_parts, on_probability, reappearance_peak,
    state_probabilities, StateProbabilities, TransitionalLength, ROAMING_TRANSITION_FACTOR,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};
use crate::geometry::{Point, Rect};

/// Tolerance on transition-matrix row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub edge_length: f64,
}

impl FieldSpec {
    pub fn new(edge_length: f64) -> Result<Self> {
        if !(edge_length > 0.0) || !edge_length.is_finite() {
            return Err(Error::invariant(
                Location::default(),
                format!("field edge length must be positive, got {edge_length}"),
            ));
        }
        Ok(FieldSpec { edge_length })
    }

    pub fn rect(&self) -> Rect {
        Rect::square(0.0, 0.0, self.edge_length)
    }

    pub fn area(&self) -> f64 {
        self.edge_length * self.edge_length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedRange {
    pub min: f64,
    pub max: f64,
}

impl SpeedRange {
    pub fn new(min: f64, max: f64) -> Self {
        SpeedRange { min, max }
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    fn validate(&self, loc: &Location) -> Result<()> {
        if !(self.min > 0.0) || !(self.max >= self.min) || !self.max.is_finite() {
            return Err(Error::invariant(
                loc.clone(),
                format!("speed range must satisfy 0 < min <= max, got [{}, {}]", self.min, self.max),
            ));
        }
        Ok(())
    }
}

/// A square region a node preferentially visits. The whole field is the
/// roaming community.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Community {
    pub id: String,
    pub origin_x: f64,
    pub origin_y: f64,
    pub edge_length: f64,
    pub is_roaming: bool,
}

impl Community {
    pub fn new(id: impl Into<String>, origin_x: f64, origin_y: f64, edge_length: f64, field: &FieldSpec) -> Result<Self> {
        let id = id.into();
        let loc = Location::default().community(id.clone());
        let n = field.edge_length;
        if !(edge_length > 0.0) || edge_length > n * (1.0 + 1e-12) {
            return Err(Error::invariant(
                loc,
                format!("community edge {edge_length} must lie in (0, {n}]"),
            ));
        }
        let hi = n - edge_length;
        let slack = 1e-9 * n;
        for (axis, v) in [("x", origin_x), ("y", origin_y)] {
            if !(v >= -slack && v <= hi + slack) {
                return Err(Error::invariant(
                    loc,
                    format!("community outside field: origin {axis}={v} not in [0, {hi}]"),
                ));
            }
        }
        let is_roaming = (edge_length - n).abs() <= slack && origin_x.abs() <= slack && origin_y.abs() <= slack;
        Ok(Community {
            id,
            origin_x,
            origin_y,
            edge_length,
            is_roaming,
        })
    }

    pub fn roaming(field: &FieldSpec) -> Self {
        Community {
            id: "roam".into(),
            origin_x: 0.0,
            origin_y: 0.0,
            edge_length: field.edge_length,
            is_roaming: true,
        }
    }

    /// A community of edge `edge` centred on `center`.
    pub fn centered(id: impl Into<String>, center: Point, edge: f64, field: &FieldSpec) -> Result<Self> {
        Community::new(id, center.x - 0.5 * edge, center.y - 0.5 * edge, edge, field)
    }

    pub fn rect(&self) -> Rect {
        Rect::square(self.origin_x, self.origin_y, self.edge_length)
    }

    pub fn area(&self) -> f64 {
        self.edge_length * self.edge_length
    }
}

/// One community as configured within a time period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodCommunity {
    pub community: Community,
    pub mean_epoch_length: f64,
    pub max_pause: f64,
    pub speed: SpeedRange,
}

impl PeriodCommunity {
    /// Pauses are uniform on `[0, max_pause]`.
    pub fn mean_pause(&self) -> f64 {
        0.5 * self.max_pause
    }

    pub fn mean_speed(&self) -> f64 {
        self.speed.mean()
    }

    /// Expected time spent moving during one epoch, `mean length / mean speed`.
    pub fn mean_move_time(&self) -> f64 {
        self.mean_epoch_length / self.mean_speed()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimePeriod {
    pub duration: f64,
    pub communities: Vec<PeriodCommunity>,
    pub transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl TimePeriod {
    pub fn new(duration: f64, communities: Vec<PeriodCommunity>, transition: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_location(duration, communities, transition, Location::default())
    }

    fn with_location(
        duration: f64,
        communities: Vec<PeriodCommunity>,
        transition: Vec<Vec<f64>>,
        loc: Location,
    ) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::invariant(loc, format!("period duration must be positive, got {duration}")));
        }
        let s = communities.len();
        if s == 0 {
            return Err(Error::invariant(loc, "period has no communities"));
        }
        if transition.len() != s || transition.iter().any(|r| r.len() != s) {
            return Err(Error::invariant(
                loc,
                format!("transition matrix must be {s}x{s} to match the community list"),
            ));
        }
        for (i, row) in transition.iter().enumerate() {
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                return Err(Error::invariant(loc, format!("row {i} has a negative or non-finite entry {v}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::invariant(loc, format!("row {i} sum {sum} ≠ 1")));
            }
        }
        for c in &communities {
            let cl = loc.clone().community(c.community.id.clone());
            if !(c.mean_epoch_length > 0.0) || !c.mean_epoch_length.is_finite() {
                return Err(Error::invariant(cl, format!("mean epoch length must be positive, got {}", c.mean_epoch_length)));
            }
            if !(c.max_pause >= 0.0) || !c.max_pause.is_finite() {
                return Err(Error::invariant(cl, format!("max pause must be non-negative, got {}", c.max_pause)));
            }
            c.speed.validate(&cl)?;
        }
        let stationary = stationary_distribution(&transition).map_err(|e| match e {
            Error::ReducibleChain => Error::invariant(loc.clone(), "transition matrix is reducible"),
            other => other,
        })?;
        Ok(TimePeriod {
            duration,
            communities,
            transition,
            stationary,
        })
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    /// Stationary distribution of the community-selection chain.
    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn rects(&self) -> Vec<Rect> {
        self.communities.iter().map(|c| c.community.rect()).collect()
    }

    pub fn roaming_index(&self) -> Option<usize> {
        self.communities.iter().position(|c| c.community.is_roaming)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p_on", rename_all = "snake_case")]
pub enum OnOffPolicy {
    AlwaysOn,
    OnWhenPaused,
    OnWhenMoving,
    /// `p_on[t][j]`, sampled once per epoch.
    FixedProb(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeProfile {
    pub id: String,
    pub field: FieldSpec,
    pub schedule: Vec<TimePeriod>,
    pub onoff: OnOffPolicy,
}

impl NodeProfile {
    pub fn new(id: impl Into<String>, field: FieldSpec, schedule: Vec<TimePeriod>, onoff: OnOffPolicy) -> Result<Self> {
        let id = id.into();
        let loc = Location::node(id.clone());
        if schedule.is_empty() {
            return Err(Error::invariant(loc, "schedule must contain at least one period"));
        }
        for (t, period) in schedule.iter().enumerate() {
            for c in &period.communities {
                // re-validate against this node's field
                Community::new(c.community.id.clone(), c.community.origin_x, c.community.origin_y, c.community.edge_length, &field)
                    .map_err(|e| relocate(e, &loc, t))?;
            }
        }
        if let OnOffPolicy::FixedProb(p) = &onoff {
            if p.len() != schedule.len() {
                return Err(Error::invariant(loc, format!("p_on has {} periods, schedule has {}", p.len(), schedule.len())));
            }
            for (t, (row, period)) in p.iter().zip(&schedule).enumerate() {
                if row.len() != period.len() {
                    return Err(Error::invariant(loc.clone().period(t), "p_on length does not match the community list"));
                }
                if let Some(v) = row.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
                    return Err(Error::invariant(loc.clone().period(t), format!("p_on entry {v} outside [0, 1]")));
                }
            }
        }
        Ok(NodeProfile {
            id,
            field,
            schedule,
            onoff,
        })
    }

    pub fn cycle_duration(&self) -> f64 {
        self.schedule.iter().map(|p| p.duration).sum()
    }

    /// Start offsets of each period within the cycle.
    pub fn period_starts(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.schedule
            .iter()
            .map(|p| {
                let s = acc;
                acc += p.duration;
                s
            })
            .collect()
    }

    /// Period index in force at absolute time `time` (cycles repeat from 0).
    pub fn period_at(&self, time: f64) -> usize {
        let cycle = self.cycle_duration();
        let mut phase = time.rem_euclid(cycle);
        for (t, p) in self.schedule.iter().enumerate() {
            if phase < p.duration {
                return t;
            }
            phase -= p.duration;
        }
        self.schedule.len() - 1
    }

    /// Absolute time at which the period containing `time` ends.
    pub fn period_end_after(&self, time: f64) -> f64 {
        let cycle = self.cycle_duration();
        let base = (time / cycle).floor() * cycle;
        let mut end = base;
        for p in &self.schedule {
            end += p.duration;
            if end > time {
                return end;
            }
        }
        base + cycle
    }

    pub fn digest_input(&self) -> String {
        serde_json::to_string(self).expect("profile serialises")
    }
}

fn relocate(e: Error, node: &Location, t: usize) -> Error {
    match e {
        Error::Invariant { location, message } => Error::Invariant {
            location: Location {
                node: node.node.clone(),
                period: Some(t),
                community: location.community,
            },
            message,
        },
        other => other,
    }
}

//! The four two-period reference scenarios: one local community inside the
//! roaming field, the local community's size and attraction varying by model.

use super::config::{CommunityTemplate, Document, NodeTemplate, PeriodTemplate, Placement};
use super::{FieldSpec, OnOffPolicy, SpeedRange};
use crate::error::{Error, Result};
use crate::geometry::Point;

pub const FIELD_EDGE: f64 = 1000.0;
pub const SPEED: SpeedRange = SpeedRange { min: 5.0, max: 15.0 };
pub const LOCAL_ID: &str = "local";
pub const ROAM_ID: &str = "roam";

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub index: u8,
    pub name: &'static str,
    /// Local community edge in each period.
    pub local_edge: [f64; 2],
    pub max_pause_local: f64,
    pub max_pause_roam: f64,
    pub mean_length_local: f64,
    pub mean_length_roam: f64,
    /// Probability of leaving the local community, per period.
    pub p_leave: [f64; 2],
    /// Probability of returning from roaming, same in both periods.
    pub p_return: f64,
    pub durations: [f64; 2],
}

/// Where a node's local community sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalPlacement {
    /// Same centre in both periods.
    Centered(Point),
    /// Same lower-left corner in both periods.
    Corner(Point),
    Random,
}

impl Model {
    pub fn table(index: u8) -> Result<Model> {
        let m = match index {
            1 => Model {
                index,
                name: "Match with the MIT trace",
                local_edge: [100.0, 100.0],
                max_pause_local: 100.0,
                max_pause_roam: 50.0,
                mean_length_local: 80.0,
                mean_length_roam: 520.0,
                p_leave: [0.2, 0.125],
                p_return: 0.5,
                durations: [5760.0, 2880.0],
            },
            2 => Model {
                index,
                name: "Highly attractive communities",
                local_edge: [200.0, 50.0],
                max_pause_local: 100.0,
                max_pause_roam: 200.0,
                mean_length_local: 52.0,
                mean_length_roam: 520.0,
                p_leave: [0.25, 0.0625],
                p_return: 0.5,
                durations: [3000.0, 2000.0],
            },
            3 => Model {
                index,
                name: "Not attractive communities",
                local_edge: [100.0, 100.0],
                max_pause_local: 50.0,
                max_pause_roam: 200.0,
                mean_length_local: 80.0,
                mean_length_roam: 800.0,
                p_leave: [0.5, 0.25],
                p_return: 0.5,
                durations: [2000.0, 1000.0],
            },
            4 => Model {
                index,
                name: "Large-size communities",
                local_edge: [200.0, 250.0],
                max_pause_local: 50.0,
                max_pause_roam: 100.0,
                mean_length_local: 200.0,
                mean_length_roam: 800.0,
                p_leave: [3.0 / 14.0, 0.0625],
                p_return: 0.5,
                durations: [2000.0, 1000.0],
            },
            _ => return Err(Error::InvalidArgument(format!("no reference model {index}, expected 1 to 4"))),
        };
        Ok(m)
    }

    pub fn all() -> Vec<Model> {
        (1..=4).map(|k| Model::table(k).expect("table index")).collect()
    }

    pub fn cycle_duration(&self) -> f64 {
        self.durations.iter().sum()
    }

    fn periods(&self, placement: LocalPlacement) -> Vec<PeriodTemplate> {
        (0..2)
            .map(|t| {
                let c = self.local_edge[t];
                let (x, y) = match placement {
                    LocalPlacement::Centered(p) => (Placement::Fixed(p.x - 0.5 * c), Placement::Fixed(p.y - 0.5 * c)),
                    LocalPlacement::Corner(p) => (Placement::Fixed(p.x), Placement::Fixed(p.y)),
                    LocalPlacement::Random => (Placement::Random, Placement::Random),
                };
                let local = CommunityTemplate { id: LOCAL_ID.into(), x, y, edge: c, speed: None };
                let roam = CommunityTemplate {
                    id: ROAM_ID.into(),
                    x: Placement::Fixed(0.0),
                    y: Placement::Fixed(0.0),
                    edge: FIELD_EDGE,
                    speed: None,
                };
                let q = self.p_leave[t];
                PeriodTemplate {
                    duration: self.durations[t],
                    speed: None,
                    communities: vec![local, roam],
                    transition: vec![vec![1.0 - q, q], vec![self.p_return, 1.0 - self.p_return]],
                    mean_epoch_length: vec![self.mean_length_local, self.mean_length_roam],
                    max_pause: vec![self.max_pause_local, self.max_pause_roam],
                }
            })
            .collect()
    }

    pub fn template(&self, id: &str, count: Option<usize>, placement: LocalPlacement, onoff: OnOffPolicy) -> NodeTemplate {
        NodeTemplate {
            id: id.into(),
            count,
            schedule: self.periods(placement),
            onoff,
        }
    }

    /// A single always-on node with its local community centred in the field.
    pub fn single(&self) -> Document {
        document(vec![self.template(
            "n",
            None,
            LocalPlacement::Centered(Point::new(0.5 * FIELD_EDGE, 0.5 * FIELD_EDGE)),
            OnOffPolicy::AlwaysOn,
        )])
    }

    /// Two groups of `per_group` nodes around (300, 300) and (700, 700).
    pub fn two_group(&self, per_group: usize) -> Document {
        document(vec![
            self.template("a", Some(per_group), LocalPlacement::Centered(Point::new(300.0, 300.0)), OnOffPolicy::AlwaysOn),
            self.template("b", Some(per_group), LocalPlacement::Centered(Point::new(700.0, 700.0)), OnOffPolicy::AlwaysOn),
        ])
    }

    /// `count` nodes, each with an independently randomised local community.
    pub fn random(&self, count: usize) -> Document {
        document(vec![self.template("n", Some(count), LocalPlacement::Random, OnOffPolicy::AlwaysOn)])
    }
}

/// Wraps templates in a document over the reference field and speed range.
pub fn document(nodes: Vec<NodeTemplate>) -> Document {
    Document {
        field: FieldSpec { edge_length: FIELD_EDGE },
        speed: Some(SPEED),
        nodes,
    }
}

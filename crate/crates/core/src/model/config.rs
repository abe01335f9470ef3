//! JSON configuration documents.
//!
//! A document names a field and a list of node templates. A template with
//! `count` expands into that many independent nodes, and community corners
//! given as `"random"` are drawn per node from the run seed.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Deserialize;
use serde_json::Value;

use super::{Community, FieldSpec, NodeProfile, OnOffPolicy, PeriodCommunity, SpeedRange, TimePeriod};
use crate::error::{Error, Location, Result};
use crate::rng;

/// A community corner coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    Fixed(f64),
    /// Uniform over the positions keeping the community inside the field;
    /// restricted to an aligned grid when the community edge divides the field.
    Random,
}

impl Placement {
    fn resolve(self, u: f64, edge: f64, field: f64) -> f64 {
        match self {
            Placement::Fixed(v) => v,
            Placement::Random => {
                let cells = field / edge;
                if (cells - cells.round()).abs() < 1e-9 {
                    (u * cells.round()).floor().min(cells.round() - 1.0) * edge
                } else {
                    u * (field - edge)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityTemplate {
    pub id: String,
    pub x: Placement,
    pub y: Placement,
    pub edge: f64,
    pub speed: Option<SpeedRange>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodTemplate {
    pub duration: f64,
    pub speed: Option<SpeedRange>,
    pub communities: Vec<CommunityTemplate>,
    pub transition: Vec<Vec<f64>>,
    pub mean_epoch_length: Vec<f64>,
    pub max_pause: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeTemplate {
    pub id: String,
    pub count: Option<usize>,
    pub schedule: Vec<PeriodTemplate>,
    pub onoff: OnOffPolicy,
}

impl NodeTemplate {
    pub fn instances(&self) -> usize {
        self.count.unwrap_or(1)
    }

    fn instance_id(&self, i: usize) -> String {
        match self.count {
            Some(_) => format!("{}-{i}", self.id),
            None => self.id.clone(),
        }
    }

    fn has_random(&self) -> bool {
        self.schedule
            .iter()
            .flat_map(|p| &p.communities)
            .any(|c| c.x == Placement::Random || c.y == Placement::Random)
    }

    fn instantiate(&self, id: String, field: &FieldSpec, global: Option<SpeedRange>, rng: &mut rng::Stream) -> Result<NodeProfile> {
        let node_loc = Location::node(id.clone());
        // one draw per community id, shared by every period that names it
        let mut draws: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
        let mut schedule = Vec::with_capacity(self.schedule.len());
        for (t, p) in self.schedule.iter().enumerate() {
            let loc = node_loc.clone().period(t);
            let s = p.communities.len();
            if p.mean_epoch_length.len() != s || p.max_pause.len() != s {
                return Err(Error::invariant(
                    loc,
                    format!(
                        "mean_epoch_length and max_pause_s need {s} entries, got {} and {}",
                        p.mean_epoch_length.len(),
                        p.max_pause.len()
                    ),
                ));
            }
            let mut communities = Vec::with_capacity(s);
            for (j, c) in p.communities.iter().enumerate() {
                let cl = loc.clone().community(c.id.clone());
                let (ux, uy) = *draws.entry(c.id.as_str()).or_insert_with(|| (rng.random(), rng.random()));
                let x = c.x.resolve(ux, c.edge, field.edge_length);
                let y = c.y.resolve(uy, c.edge, field.edge_length);
                let community = Community::new(c.id.clone(), x, y, c.edge, field).map_err(|e| match e {
                    Error::Invariant { message, .. } => Error::invariant(cl.clone(), message),
                    other => other,
                })?;
                let speed = c.speed.or(p.speed).or(global).ok_or_else(|| {
                    Error::schema(cl.clone(), "no speed range given for the community, its period or the document")
                })?;
                communities.push(PeriodCommunity {
                    community,
                    mean_epoch_length: p.mean_epoch_length[j],
                    max_pause: p.max_pause[j],
                    speed,
                });
            }
            schedule.push(TimePeriod::with_location(p.duration, communities, p.transition.clone(), loc)?);
        }
        NodeProfile::new(id, *field, schedule, self.onoff.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub field: FieldSpec,
    pub speed: Option<SpeedRange>,
    pub nodes: Vec<NodeTemplate>,
}

impl Document {
    pub fn node_count(&self) -> usize {
        self.nodes.iter().map(|n| n.instances()).sum()
    }

    /// Expands templates into concrete profiles. Random placements draw from
    /// the placement stream of each expanded node index.
    pub fn instantiate(&self, seed: u64) -> Result<Vec<NodeProfile>> {
        let mut out = Vec::with_capacity(self.node_count());
        for template in &self.nodes {
            for i in 0..template.instances() {
                let mut r = rng::stream(seed, rng::PLACEMENT_SPACE | out.len() as u64);
                out.push(template.instantiate(template.instance_id(i), &self.field, self.speed, &mut r)?);
            }
        }
        Ok(out)
    }

    /// True if instantiation depends on the seed.
    pub fn is_randomized(&self) -> bool {
        self.nodes.iter().any(|n| n.has_random())
    }

    pub fn to_json(&self) -> Value {
        let speed = |s: &SpeedRange| serde_json::json!({"min": s.min, "max": s.max});
        let coord = |p: &Placement| match p {
            Placement::Fixed(v) => serde_json::json!(v),
            Placement::Random => serde_json::json!("random"),
        };
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                let schedule: Vec<Value> = n
                    .schedule
                    .iter()
                    .map(|p| {
                        let communities: Vec<Value> = p
                            .communities
                            .iter()
                            .map(|c| {
                                let mut v = serde_json::json!({"id": c.id, "x": coord(&c.x), "y": coord(&c.y), "edge": c.edge});
                                if let Some(s) = &c.speed {
                                    v["speed"] = speed(s);
                                }
                                v
                            })
                            .collect();
                        let mut v = serde_json::json!({
                            "duration_s": p.duration,
                            "communities": communities,
                            "transition_matrix": p.transition,
                            "mean_epoch_length": p.mean_epoch_length,
                            "max_pause_s": p.max_pause,
                        });
                        if let Some(s) = &p.speed {
                            v["speed"] = speed(s);
                        }
                        v
                    })
                    .collect();
                let mut v = serde_json::json!({"id": n.id, "schedule": schedule, "onoff": onoff_json(&n.onoff)});
                if let Some(c) = n.count {
                    v["count"] = serde_json::json!(c);
                }
                v
            })
            .collect();
        let mut doc = serde_json::json!({"field": {"edge_length": self.field.edge_length}, "nodes": nodes});
        if let Some(s) = &self.speed {
            doc["speed"] = speed(s);
        }
        doc
    }
}

fn onoff_json(p: &OnOffPolicy) -> Value {
    match p {
        OnOffPolicy::AlwaysOn => serde_json::json!({"kind": "ALWAYS_ON"}),
        OnOffPolicy::OnWhenPaused => serde_json::json!({"kind": "ON_WHEN_PAUSED"}),
        OnOffPolicy::OnWhenMoving => serde_json::json!({"kind": "ON_WHEN_MOVING"}),
        OnOffPolicy::FixedProb(p) => serde_json::json!({"kind": "FIXED_PROB", "p_on": p}),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    edge_length: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCoord {
    Number(f64),
    Word(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCommunity {
    id: String,
    x: RawCoord,
    y: RawCoord,
    edge: f64,
    #[serde(default)]
    speed: Option<SpeedRange>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPeriod {
    duration_s: f64,
    #[serde(default)]
    speed: Option<SpeedRange>,
    communities: Vec<RawCommunity>,
    transition_matrix: Vec<Vec<f64>>,
    mean_epoch_length: Vec<f64>,
    max_pause_s: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPOn {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOnOff {
    kind: String,
    #[serde(default)]
    p_on: Option<RawPOn>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    #[serde(default)]
    count: Option<usize>,
    schedule: Vec<RawPeriod>,
    #[serde(default)]
    onoff: Option<RawOnOff>,
}

fn coord(raw: RawCoord, loc: &Location, axis: &str) -> Result<Placement> {
    match raw {
        RawCoord::Number(v) => Ok(Placement::Fixed(v)),
        RawCoord::Word(w) if w == "random" => Ok(Placement::Random),
        RawCoord::Word(w) => Err(Error::schema(loc.clone(), format!("{axis} must be a number or \"random\", got {w:?}"))),
    }
}

fn onoff(raw: Option<RawOnOff>, periods: &[RawPeriod], loc: &Location) -> Result<OnOffPolicy> {
    let Some(raw) = raw else {
        return Ok(OnOffPolicy::AlwaysOn);
    };
    let kind = raw.kind.to_ascii_uppercase();
    match (kind.as_str(), raw.p_on) {
        ("ALWAYS_ON", None) => Ok(OnOffPolicy::AlwaysOn),
        ("ON_WHEN_PAUSED", None) => Ok(OnOffPolicy::OnWhenPaused),
        ("ON_WHEN_MOVING", None) => Ok(OnOffPolicy::OnWhenMoving),
        ("FIXED_PROB", Some(RawPOn::Nested(p))) => Ok(OnOffPolicy::FixedProb(p)),
        ("FIXED_PROB", Some(RawPOn::Flat(flat))) => {
            // a flat list applies the per-community values to every period
            // when all periods share one layout, else concatenates them
            let sizes: Vec<usize> = periods.iter().map(|p| p.communities.len()).collect();
            if sizes.iter().all(|s| *s == flat.len()) {
                Ok(OnOffPolicy::FixedProb(vec![flat; periods.len()]))
            } else if sizes.iter().sum::<usize>() == flat.len() {
                let mut rest = flat.as_slice();
                let mut nested = Vec::new();
                for s in sizes {
                    let (head, tail) = rest.split_at(s);
                    nested.push(head.to_vec());
                    rest = tail;
                }
                Ok(OnOffPolicy::FixedProb(nested))
            } else {
                Err(Error::invariant(loc.clone(), format!("p_on has {} entries, which matches no community layout", flat.len())))
            }
        }
        ("FIXED_PROB", None) => Err(Error::schema(loc.clone(), "FIXED_PROB needs p_on")),
        ("ALWAYS_ON" | "ON_WHEN_PAUSED" | "ON_WHEN_MOVING", Some(_)) => {
            Err(Error::schema(loc.clone(), format!("p_on is only allowed with FIXED_PROB, not {kind}")))
        }
        _ => Err(Error::schema(loc.clone(), format!("unknown onoff kind {:?}", raw.kind))),
    }
}

fn node_template(raw: RawNode) -> Result<NodeTemplate> {
    let loc = Location::node(raw.id.clone());
    if raw.count == Some(0) {
        return Err(Error::schema(loc, "count must be at least 1"));
    }
    let onoff = onoff(raw.onoff, &raw.schedule, &loc)?;
    let mut schedule = Vec::with_capacity(raw.schedule.len());
    for (t, p) in raw.schedule.into_iter().enumerate() {
        let mut communities = Vec::with_capacity(p.communities.len());
        for c in p.communities {
            let cl = loc.clone().period(t).community(c.id.clone());
            communities.push(CommunityTemplate {
                x: coord(c.x, &cl, "x")?,
                y: coord(c.y, &cl, "y")?,
                id: c.id,
                edge: c.edge,
                speed: c.speed,
            });
        }
        schedule.push(PeriodTemplate {
            duration: p.duration_s,
            speed: p.speed,
            communities,
            transition: p.transition_matrix,
            mean_epoch_length: p.mean_epoch_length,
            max_pause: p.max_pause_s,
        });
    }
    Ok(NodeTemplate {
        id: raw.id,
        count: raw.count,
        schedule,
        onoff,
    })
}

fn schema_at(loc: Location) -> impl Fn(serde_json::Error) -> Error {
    move |e| Error::schema(loc.clone(), e.to_string())
}

/// Parses a document without resolving random placements.
pub fn parse_document(text: &str) -> Result<Document> {
    let root: Value = serde_json::from_str(text).map_err(schema_at(Location::default()))?;
    let Value::Object(mut top) = root else {
        return Err(Error::schema(Location::default(), "top level must be an object"));
    };
    if let Some(k) = top.keys().find(|k| !matches!(k.as_str(), "field" | "speed" | "nodes")) {
        return Err(Error::schema(Location::default(), format!("unknown top-level field {k:?}")));
    }
    let field_raw = top.remove("field").ok_or_else(|| Error::schema(Location::default(), "missing field"))?;
    let field_raw: RawField = serde_json::from_value(field_raw).map_err(schema_at(Location::default()))?;
    let field = FieldSpec::new(field_raw.edge_length)?;
    let speed = match top.remove("speed") {
        Some(v) => Some(serde_json::from_value::<SpeedRange>(v).map_err(schema_at(Location::default()))?),
        None => None,
    };
    let Some(Value::Array(raw_nodes)) = top.remove("nodes") else {
        return Err(Error::schema(Location::default(), "nodes must be an array"));
    };
    if raw_nodes.is_empty() {
        return Err(Error::schema(Location::default(), "nodes is empty"));
    }
    let mut nodes = Vec::with_capacity(raw_nodes.len());
    for (i, v) in raw_nodes.into_iter().enumerate() {
        let label = v.get("id").and_then(Value::as_str).map(str::to_owned).unwrap_or_else(|| format!("#{i}"));
        let raw: RawNode = serde_json::from_value(v).map_err(schema_at(Location::node(label)))?;
        nodes.push(node_template(raw)?);
    }
    Ok(Document { field, speed, nodes })
}

/// Parses, expands and validates a document into concrete node profiles.
pub fn load_and_validate(text: &str, seed: u64) -> Result<Vec<NodeProfile>> {
    parse_document(text)?.instantiate(seed)
}

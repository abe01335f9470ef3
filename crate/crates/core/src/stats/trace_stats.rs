use std::collections::HashMap;

use serde::Serialize;

use super::ecdf::Ecdf;
use super::ingest::ContactEvent;
use crate::error::{Error, Result};
use crate::simulator::{Sample, Snapshot, Trace};

/// Default location cell edge for synthetic traces.
pub const DEFAULT_GRID: f64 = 100.0;

fn cell(s: &Sample, g: f64) -> (i64, i64) {
    ((s.x / g).floor() as i64, (s.y / g).floor() as i64)
}

fn check_grid(g: f64) -> Result<()> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::InvalidArgument(format!("grid cell size must be positive, got {g}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodePreference {
    pub node: String,
    /// On-time shares per visited cell, largest first.
    pub fractions: Vec<f64>,
    /// Set when the node is never on.
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedPreference {
    pub nodes: Vec<NodePreference>,
    /// Rank-wise mean over the non-empty nodes.
    pub mean: Vec<f64>,
}

impl RankedPreference {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,fraction\n");
        for (i, f) in self.mean.iter().enumerate() {
            s.push_str(&format!("{},{f}\n", i + 1));
        }
        s
    }
}

/// Share of each node's on-time spent in each grid cell, ranked.
pub fn visiting_preference(trace: &Trace, g: f64) -> Result<RankedPreference> {
    check_grid(g)?;
    let mut nodes = Vec::with_capacity(trace.nodes.len());
    for n in &trace.nodes {
        let mut time: HashMap<(i64, i64), usize> = HashMap::new();
        let mut total = 0usize;
        for s in n.samples.iter().filter(|s| s.on) {
            *time.entry(cell(s, g)).or_default() += 1;
            total += 1;
        }
        let mut fractions: Vec<f64> = time.values().map(|c| *c as f64 / total as f64).collect();
        fractions.sort_by(|a, b| b.total_cmp(a));
        nodes.push(NodePreference {
            node: n.id.clone(),
            empty: total == 0,
            fractions,
        });
    }
    let live: Vec<&NodePreference> = nodes.iter().filter(|n| !n.empty).collect();
    let width = live.iter().map(|n| n.fractions.len()).max().unwrap_or(0);
    let mean = (0..width)
        .map(|r| live.iter().map(|n| n.fractions.get(r).copied().unwrap_or(0.0)).sum::<f64>() / live.len() as f64)
        .collect();
    Ok(RankedPreference { nodes, mean })
}

/// How re-appearance is estimated at each gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReappearanceEstimator {
    /// Among sample pairs where the node is on at both ends, the share in
    /// the same cell.
    Conditional,
    /// Among all sample pairs, the share where the node is on at both ends
    /// and in the same cell.
    Joint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReappearancePoint {
    pub gap_s: f64,
    pub probability: f64,
    /// Sample pairs that entered the estimate.
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReappearanceCurve {
    pub points: Vec<ReappearancePoint>,
}

impl ReappearanceCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("gap_h,probability\n");
        for p in &self.points {
            s.push_str(&format!("{},{}\n", p.gap_s / 3600.0, p.probability));
        }
        s
    }
}

/// Probability of being seen in the same grid cell again after each gap,
/// pooled over nodes. Gaps are rounded to whole samples.
pub fn reappearance_curve(trace: &Trace, g: f64, gaps_s: &[f64], estimator: ReappearanceEstimator) -> Result<ReappearanceCurve> {
    check_grid(g)?;
    let dt = trace.dt();
    let mut points = Vec::with_capacity(gaps_s.len());
    for &gap in gaps_s {
        let lag = (gap / dt).round() as usize;
        if lag >= trace.len() {
            return Err(Error::InvalidArgument(format!("gap {gap} s is not shorter than the trace")));
        }
        let (mut same, mut pairs) = (0usize, 0usize);
        for n in &trace.nodes {
            let s = &n.samples;
            for i in 0..s.len().saturating_sub(lag) {
                let (a, b) = (&s[i], &s[i + lag]);
                let both_on = a.on && b.on;
                match estimator {
                    ReappearanceEstimator::Conditional if !both_on => continue,
                    _ => {}
                }
                pairs += 1;
                if both_on && cell(a, g) == cell(b, g) {
                    same += 1;
                }
            }
        }
        points.push(ReappearancePoint {
            gap_s: gap,
            probability: if pairs > 0 { same as f64 / pairs as f64 } else { 0.0 },
            pairs,
        });
    }
    Ok(ReappearanceCurve { points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactReport {
    pub events: Vec<ContactEvent>,
    pub durations: Ecdf,
    pub inter_meetings: Ecdf,
}

/// Contact = maximal run of samples with both nodes on and at distance at
/// most `k`; it ends one sample interval after its last in-range sample.
pub fn contacts(trace: &Trace, k: f64) -> Result<ContactReport> {
    trace.require_aligned()?;
    let dt = trace.dt();
    let k2 = k * k;
    let mut events = Vec::new();
    for i in 0..trace.nodes.len() {
        for j in (i + 1)..trace.nodes.len() {
            let (a, b) = (&trace.nodes[i], &trace.nodes[j]);
            let mut start: Option<f64> = None;
            let mut last = 0.0;
            for (sa, sb) in a.samples.iter().zip(&b.samples) {
                let dx = sa.x - sb.x;
                let dy = sa.y - sb.y;
                let close = sa.on && sb.on && dx * dx + dy * dy <= k2;
                if close {
                    start.get_or_insert(sa.t);
                    last = sa.t;
                } else if let Some(s) = start.take() {
                    events.push(ContactEvent { a: a.id.clone(), b: b.id.clone(), start: s, end: last + dt });
                }
            }
            if let Some(s) = start {
                events.push(ContactEvent { a: a.id.clone(), b: b.id.clone(), start: s, end: last + dt });
            }
        }
    }
    Ok(contact_report(events))
}

/// Duration and inter-meeting distributions of a contact list, for
/// generated or ingested encounters alike.
pub fn contact_report(mut events: Vec<ContactEvent>) -> ContactReport {
    events.sort_by(|x, y| {
        let key = |e: &ContactEvent| if e.a <= e.b { (e.a.clone(), e.b.clone()) } else { (e.b.clone(), e.a.clone()) };
        key(x).cmp(&key(y)).then(x.start.total_cmp(&y.start))
    });
    let durations: Vec<f64> = events.iter().map(ContactEvent::duration).collect();
    let mut gaps = Vec::new();
    for w in events.windows(2) {
        let same_pair = (w[0].a == w[1].a && w[0].b == w[1].b) || (w[0].a == w[1].b && w[0].b == w[1].a);
        if same_pair {
            gaps.push(w[1].start - w[0].end);
        }
    }
    ContactReport {
        durations: Ecdf::new(&durations),
        inter_meetings: Ecdf::new(&gaps),
        events,
    }
}

/// Running neighbour counts, fed one snapshot at a time.
#[derive(Debug, Clone, Default)]
pub struct DegreeAccumulator {
    sum: Vec<f64>,
    on_samples: Vec<usize>,
    k2: f64,
}

impl DegreeAccumulator {
    pub fn new(nodes: usize, k: f64) -> Self {
        DegreeAccumulator {
            sum: vec![0.0; nodes],
            on_samples: vec![0; nodes],
            k2: k * k,
        }
    }

    pub fn add(&mut self, snap: &Snapshot) {
        self.add_points(snap.positions.iter().map(|p| (p.x, p.y)), &snap.on);
    }

    fn add_points(&mut self, pos: impl Iterator<Item = (f64, f64)>, on: &[bool]) {
        let pos: Vec<(f64, f64)> = pos.collect();
        let mut count = vec![0usize; pos.len()];
        for i in 0..pos.len() {
            if !on[i] {
                continue;
            }
            for j in (i + 1)..pos.len() {
                if on[j] {
                    let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                    if dx * dx + dy * dy <= self.k2 {
                        count[i] += 1;
                        count[j] += 1;
                    }
                }
            }
        }
        for i in 0..pos.len() {
            if on[i] {
                self.sum[i] += count[i] as f64;
                self.on_samples[i] += 1;
            }
        }
    }

    /// Mean neighbour count per node over the samples where it is on.
    pub fn per_node(&self) -> Vec<f64> {
        self.sum
            .iter()
            .zip(&self.on_samples)
            .map(|(s, n)| if *n > 0 { s / *n as f64 } else { 0.0 })
            .collect()
    }

    pub fn mean(&self) -> f64 {
        let v = self.per_node();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    }
}

/// Time-averaged count of other on-nodes within `k`, per node.
pub fn empirical_node_degree(trace: &Trace, k: f64) -> Result<Vec<f64>> {
    trace.require_aligned()?;
    let mut acc = DegreeAccumulator::new(trace.nodes.len(), k);
    let mut on = vec![false; trace.nodes.len()];
    for s in 0..trace.len() {
        for (i, n) in trace.nodes.iter().enumerate() {
            on[i] = n.samples[s].on;
        }
        acc.add_points(trace.nodes.iter().map(|n| (n.samples[s].x, n.samples[s].y)), &on);
    }
    Ok(acc.per_node())
}

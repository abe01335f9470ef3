use std::f64::consts::PI;

use serde::Serialize;

use super::view::{align, OccupancyView};
use crate::error::{Error, Result};
use crate::geometry::{intersection_area, Rect};

/// Chance that a node uniform on `a` and a node uniform on `b` are within
/// `k` of each other.
pub fn pairwise_degree_contribution(a: &Rect, b: &Rect, k: f64) -> f64 {
    PI * k * k * intersection_area(a, b) / (a.area() * b.area())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeTerm {
    pub interval: usize,
    pub peer: String,
    pub state: String,
    pub peer_state: String,
    /// Time weight times both state probabilities.
    pub weight: f64,
    /// In-range probability given both states.
    pub probability: f64,
    /// `weight * probability`; the terms sum to the degree.
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub node: String,
    pub degree: f64,
    pub terms: Vec<DegreeTerm>,
}

pub(crate) const TRANSIT_ID: &str = "transit";

/// States with their probabilities; transitional time is spread over the
/// whole field, like a roaming epoch.
fn degree_states(v: &OccupancyView, t: usize) -> Vec<(&str, Rect, f64)> {
    let p = &v.periods[t];
    let mut out: Vec<(&str, Rect, f64)> = p.states.iter().map(|s| (s.id.as_str(), s.rect, s.p_state())).collect();
    if p.p_tr > 0.0 {
        out.push((TRANSIT_ID, v.field.rect(), p.p_tr));
    }
    out
}

fn check_range(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("transmission range must be positive, got {k}")));
    }
    Ok(())
}

fn pair_terms(a: &OccupancyView, b: &OccupancyView, k: f64, terms: Option<&mut Vec<DegreeTerm>>) -> Result<f64> {
    let intervals = align(&[a, b])?;
    let cycle = a.cycle_duration();
    let mut total = 0.0;
    let mut sink = terms;
    for (i, iv) in intervals.iter().enumerate() {
        let w = iv.duration / cycle;
        for (sa, ra, pa) in degree_states(a, iv.periods[0]) {
            for (sb, rb, pb) in degree_states(b, iv.periods[1]) {
                let c = pairwise_degree_contribution(&ra, &rb, k);
                if c == 0.0 {
                    continue;
                }
                let weight = w * pa * pb;
                total += weight * c;
                if let Some(terms) = sink.as_deref_mut() {
                    terms.push(DegreeTerm {
                        interval: i,
                        peer: b.id.clone(),
                        state: sa.into(),
                        peer_state: sb.into(),
                        weight,
                        probability: c,
                        contribution: weight * c,
                    });
                }
            }
        }
    }
    Ok(total)
}

/// Expected number of time-averaged neighbours `b` contributes to `a`.
pub fn pair_degree(a: &OccupancyView, b: &OccupancyView, k: f64) -> Result<f64> {
    check_range(k)?;
    pair_terms(a, b, k, None)
}

/// Expected neighbour count of `views[node]` over all other views.
pub fn average_node_degree(node: usize, views: &[OccupancyView], k: f64) -> Result<DegreeReport> {
    check_range(k)?;
    let a = views
        .get(node)
        .ok_or_else(|| Error::InvalidArgument(format!("node index {node} out of range")))?;
    let mut terms = Vec::new();
    let mut degree = 0.0;
    for (i, b) in views.iter().enumerate() {
        if i != node {
            degree += pair_terms(a, b, k, Some(&mut terms))?;
        }
    }
    Ok(DegreeReport {
        node: a.id.clone(),
        degree,
        terms,
    })
}

/// Mean of the expected node degree over all nodes.
pub fn network_degree(views: &[OccupancyView], k: f64) -> Result<f64> {
    check_range(k)?;
    if views.len() < 2 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for i in 0..views.len() {
        for j in (i + 1)..views.len() {
            sum += 2.0 * pair_terms(&views[i], &views[j], k, None)?;
        }
    }
    Ok(sum / views.len() as f64)
}

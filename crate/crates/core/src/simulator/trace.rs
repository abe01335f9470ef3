use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::mobility::{Cursor, NodeMobility, Phase, Segment};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::model::NodeProfile;

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub seed: u64,
    pub duration: f64,
    pub dt: f64,
    pub profiles: Vec<NodeProfile>,
}

impl RunSpec {
    pub fn new(seed: u64, duration: f64, dt: f64, profiles: Vec<NodeProfile>) -> Result<Self> {
        let run = RunSpec { seed, duration, dt, profiles };
        run.validate()?;
        Ok(run)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.duration >= self.dt) || !self.duration.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need duration >= dt > 0, got duration {} and dt {}",
                self.duration, self.dt
            )));
        }
        Ok(())
    }

    /// Number of samples `0, dt, ..., floor(duration / dt) * dt`.
    pub fn sample_count(&self) -> usize {
        sample_count(self.duration, self.dt)
    }

    pub fn digest(&self) -> String {
        profile_digest(&self.profiles)
    }

    /// Segment stream of node `i`.
    pub fn mobility(&self, i: usize) -> NodeMobility<'_> {
        NodeMobility::new(&self.profiles[i], self.seed, i)
    }
}

fn sample_count(duration: f64, dt: f64) -> usize {
    // tolerate duration/dt landing a hair below an integer
    ((duration / dt) * (1.0 + 1e-12)).floor() as usize + 1
}

pub fn profile_digest(profiles: &[NodeProfile]) -> String {
    let mut h = Sha256::new();
    for p in profiles {
        h.update(p.digest_input().as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub on: bool,
}

impl Sample {
    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Mobility state behind a generated sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleState {
    pub phase: Phase,
    pub period: usize,
    pub community: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeTrack {
    pub id: String,
    pub samples: Vec<Sample>,
    /// Parallel to `samples` for generated traces, empty for ingested ones.
    pub states: Vec<SampleState>,
    /// Segments overlapping the run, kept for NS2 output.
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMeta {
    pub seed: Option<u64>,
    pub duration: f64,
    pub dt: f64,
    pub profile_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub meta: TraceMeta,
    pub nodes: Vec<NodeTrack>,
}

impl Trace {
    pub fn dt(&self) -> f64 {
        self.meta.dt
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Samples per node, assuming all nodes share one time grid.
    pub fn len(&self) -> usize {
        self.nodes.first().map_or(0, |n| n.samples.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fails unless every node has the same sample times.
    pub fn require_aligned(&self) -> Result<()> {
        let Some(first) = self.nodes.first() else {
            return Ok(());
        };
        for n in &self.nodes[1..] {
            if n.samples.len() != first.samples.len() || n.samples.iter().zip(&first.samples).any(|(a, b)| a.t != b.t) {
                return Err(Error::InvalidArgument(format!("node {} is not sampled on the common time grid", n.id)));
            }
        }
        Ok(())
    }
}

fn track(run: &RunSpec, i: usize) -> NodeTrack {
    let n = run.sample_count();
    let mut samples = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    let mut segments = Vec::new();
    let mut stream = run.mobility(i);
    let mut seg = stream.next().expect("unbounded stream");
    segments.push(seg);
    for k in 0..n {
        let t = k as f64 * run.dt;
        while seg.t1 <= t {
            seg = stream.next().expect("unbounded stream");
            segments.push(seg);
        }
        let p = seg.position(t);
        samples.push(Sample { t, x: p.x, y: p.y, on: seg.on });
        states.push(SampleState {
            phase: seg.phase,
            period: seg.period,
            community: seg.community,
        });
    }
    // keep the segments that start before the run ends
    while seg.t1 < run.duration {
        seg = stream.next().expect("unbounded stream");
        segments.push(seg);
    }
    NodeTrack {
        id: run.profiles[i].id.clone(),
        samples,
        states,
        segments,
    }
}

/// Samples every node at `k * dt`. Nodes are generated in parallel; each
/// draws only from its own stream, so output is independent of scheduling.
pub fn generate_trace(run: &RunSpec) -> Result<Trace> {
    run.validate()?;
    let nodes = (0..run.profiles.len()).into_par_iter().map(|i| track(run, i)).collect();
    Ok(Trace {
        meta: TraceMeta {
            seed: Some(run.seed),
            duration: run.duration,
            dt: run.dt,
            profile_digest: Some(run.digest()),
        },
        nodes,
    })
}

/// Node positions and on-flags at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub positions: Vec<Point>,
    pub on: Vec<bool>,
}

/// Walks all nodes forward in time without storing the trace, for long
/// runs whose samples would not fit in memory.
pub struct Snapshots<'a> {
    cursors: Vec<Cursor<'a>>,
}

impl<'a> Snapshots<'a> {
    pub fn new(run: &'a RunSpec) -> Self {
        Snapshots {
            cursors: (0..run.profiles.len()).map(|i| Cursor::new(run.mobility(i))).collect(),
        }
    }

    /// Snapshot at `t`; successive calls must not go back in time.
    pub fn at(&mut self, t: f64) -> Snapshot {
        let mut positions = Vec::with_capacity(self.cursors.len());
        let mut on = Vec::with_capacity(self.cursors.len());
        for c in &mut self.cursors {
            let s = c.at(t);
            positions.push(s.position(t));
            on.push(s.on);
        }
        Snapshot { t, positions, on }
    }

    /// Regular snapshots `0, dt, ...` up to `duration`.
    pub fn grid(run: &'a RunSpec) -> impl Iterator<Item = Snapshot> + 'a {
        let mut s = Snapshots::new(run);
        let dt = run.dt;
        (0..run.sample_count()).map(move |k| s.at(k as f64 * dt))
    }
}

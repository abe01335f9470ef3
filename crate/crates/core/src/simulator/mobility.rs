use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;

use crate::geometry::{Point, Rect};
use crate::model::{NodeProfile, OnOffPolicy, PeriodCommunity};
use crate::rng::{self, Stream};

/// Epoch lengths beyond this many means are clipped.
pub const EPOCH_TRUNCATION: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    Moving,
    Paused,
    Transitional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EpochKind {
    InCommunity,
    Transitional,
}

/// One sampled epoch. For transitional epochs `community` is the
/// destination, `heading` points at the target and `pause_after` is 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Epoch {
    pub kind: EpochKind,
    pub community: usize,
    pub length: f64,
    pub speed: f64,
    pub heading: f64,
    pub pause_after: f64,
}

/// A stretch of constant velocity. Torus wraps start a new segment, so the
/// position is linear in time within one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub start: Point,
    pub vx: f64,
    pub vy: f64,
    pub phase: Phase,
    /// Community index within `period`.
    pub community: usize,
    /// Period whose parameters the epoch was drawn from.
    pub period: usize,
    pub on: bool,
    /// True for the first segment of an in-community or transitional epoch.
    pub epoch_start: bool,
}

impl Segment {
    pub fn position(&self, t: f64) -> Point {
        let dt = t - self.t0;
        Point::new(self.start.x + self.vx * dt, self.start.y + self.vy * dt)
    }

    pub fn end(&self) -> Point {
        self.position(self.t1)
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }
}

/// Draws an epoch in community `j` of the given period settings.
pub fn sample_epoch(c: &PeriodCommunity, j: usize, rng: &mut Stream) -> Epoch {
    let mean = c.mean_epoch_length;
    let length = Exp::new(1.0 / mean).expect("positive mean").sample(rng).min(EPOCH_TRUNCATION * mean);
    let speed = uniform(rng, c.speed.min, c.speed.max);
    let heading = rng.random::<f64>() * std::f64::consts::TAU;
    let pause_after = uniform(rng, 0.0, c.max_pause);
    Epoch {
        kind: EpochKind::InCommunity,
        community: j,
        length,
        speed,
        heading,
        pause_after,
    }
}

/// Uniform on `[lo, hi]`; a degenerate range consumes no randomness.
fn uniform(rng: &mut Stream, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        lo + (hi - lo) * rng.random::<f64>()
    } else {
        lo
    }
}

/// Picks an index from a probability vector.
pub fn choose(weights: &[f64], rng: &mut Stream) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // rounding slack: fall back to the last index with positive weight
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

/// Lazily generated, unbounded segment sequence of one node.
#[derive(Clone)]
pub struct NodeMobility<'a> {
    profile: &'a NodeProfile,
    rng: Stream,
    time: f64,
    pos: Point,
    community: usize,
    period: usize,
    /// Period instance (cycle * V + period) of the last decision.
    instance: u64,
    pending: VecDeque<Segment>,
}

impl<'a> NodeMobility<'a> {
    pub fn new(profile: &'a NodeProfile, seed: u64, node: usize) -> Self {
        Self::from_stream(profile, rng::node_stream(seed, node))
    }

    /// Starts from the first period's stationary distribution at a uniform
    /// point of the chosen community.
    pub fn from_stream(profile: &'a NodeProfile, mut rng: Stream) -> Self {
        let first = &profile.schedule[0];
        let j = choose(first.stationary(), &mut rng);
        let pos = first.communities[j].community.rect().lerp(rng.random(), rng.random());
        let mut m = NodeMobility {
            profile,
            rng,
            time: 0.0,
            pos,
            community: j,
            period: 0,
            instance: 0,
            pending: VecDeque::new(),
        };
        m.push_epoch(j, None);
        m
    }

    pub fn profile(&self) -> &NodeProfile {
        self.profile
    }

    fn instance_at(&self, time: f64) -> (usize, u64) {
        let v = self.profile.schedule.len() as u64;
        let cycle = (time / self.profile.cycle_duration()).floor().max(0.0) as u64;
        let t = self.profile.period_at(time);
        (t, cycle * v + t as u64)
    }

    fn decide(&mut self) {
        let (t, instance) = self.instance_at(self.time);
        let period = &self.profile.schedule[t];
        let source = self.profile.schedule[self.period].communities[self.community].clone();
        let j = if instance == self.instance {
            choose(&period.transition[self.community], &mut self.rng)
        } else {
            choose(period.stationary(), &mut self.rng)
        };
        self.period = t;
        self.instance = instance;
        self.push_epoch(j, Some(source));
    }

    fn on_flag(&mut self, j: usize) -> Option<bool> {
        match &self.profile.onoff {
            OnOffPolicy::FixedProb(p) => {
                let pj = p[self.period][j];
                Some(self.rng.random::<f64>() < pj)
            }
            _ => None,
        }
    }

    fn phase_on(&self, phase: Phase, fixed: Option<bool>) -> bool {
        match (&self.profile.onoff, fixed) {
            (_, Some(on)) => on,
            (OnOffPolicy::OnWhenPaused, _) => phase == Phase::Paused,
            (OnOffPolicy::OnWhenMoving, _) => phase == Phase::Moving,
            _ => true,
        }
    }

    /// Queues the segments of one epoch in community `j` of the current period,
    /// preceded by a transitional leg if the node is outside it.
    fn push_epoch(&mut self, j: usize, source: Option<PeriodCommunity>) {
        let pc = self.profile.schedule[self.period].communities[j].clone();
        let epoch = sample_epoch(&pc, j, &mut self.rng);
        let rect = pc.community.rect();
        let transit = if rect.contains(self.pos) {
            None
        } else {
            let target = rect.lerp(self.rng.random(), self.rng.random());
            let range = source.as_ref().map(|s| s.speed).unwrap_or(pc.speed);
            let speed = uniform(&mut self.rng, range.min, range.max);
            Some((target, speed))
        };
        let fixed = self.on_flag(j);
        if let Some((target, speed)) = transit {
            let d = self.pos.distance(target);
            let dur = d / speed;
            self.pending.push_back(Segment {
                t0: self.time,
                t1: self.time + dur,
                start: self.pos,
                vx: (target.x - self.pos.x) / dur,
                vy: (target.y - self.pos.y) / dur,
                phase: Phase::Transitional,
                community: j,
                period: self.period,
                on: self.phase_on(Phase::Transitional, fixed),
                epoch_start: true,
            });
            self.time += dur;
            self.pos = target;
        }
        self.push_moving(&epoch, &rect, fixed);
        if epoch.pause_after > 0.0 {
            self.pending.push_back(Segment {
                t0: self.time,
                t1: self.time + epoch.pause_after,
                start: self.pos,
                vx: 0.0,
                vy: 0.0,
                phase: Phase::Paused,
                community: j,
                period: self.period,
                on: self.phase_on(Phase::Paused, fixed),
                epoch_start: false,
            });
            self.time += epoch.pause_after;
        }
        self.community = j;
    }

    fn push_moving(&mut self, epoch: &Epoch, rect: &Rect, fixed: Option<bool>) {
        let (dx, dy) = (epoch.heading.cos(), epoch.heading.sin());
        let on = self.phase_on(Phase::Moving, fixed);
        let mut left = epoch.length;
        let mut first = true;
        while left > 0.0 {
            let exit_x = axis_exit(self.pos.x, dx, rect.x0, rect.x1);
            let exit_y = axis_exit(self.pos.y, dy, rect.y0, rect.y1);
            let step = left.min(exit_x).min(exit_y);
            let dur = step / epoch.speed;
            if dur > 0.0 {
                self.pending.push_back(Segment {
                    t0: self.time,
                    t1: self.time + dur,
                    start: self.pos,
                    vx: epoch.speed * dx,
                    vy: epoch.speed * dy,
                    phase: Phase::Moving,
                    community: epoch.community,
                    period: self.period,
                    on,
                    epoch_start: first,
                });
                first = false;
            }
            self.time += dur;
            self.pos = self.pos.offset(step * dx, step * dy);
            left -= step;
            if left > 0.0 {
                // re-insert from the opposite edge of the community torus
                self.pos = Point::new(wrap_edge(self.pos.x, dx, rect.x0, rect.x1), wrap_edge(self.pos.y, dy, rect.y0, rect.y1));
            } else {
                self.pos = Point::new(self.pos.x.clamp(rect.x0, rect.x1), self.pos.y.clamp(rect.y0, rect.y1));
            }
        }
    }
}

fn axis_exit(p: f64, d: f64, lo: f64, hi: f64) -> f64 {
    if d > 1e-15 {
        ((hi - p) / d).max(0.0)
    } else if d < -1e-15 {
        ((p - lo) / -d).max(0.0)
    } else {
        f64::INFINITY
    }
}

fn wrap_edge(p: f64, d: f64, lo: f64, hi: f64) -> f64 {
    let eps = 1e-9 * (hi - lo);
    if d > 1e-15 && p >= hi - eps {
        lo
    } else if d < -1e-15 && p <= lo + eps {
        hi
    } else {
        p.clamp(lo, hi)
    }
}

impl Iterator for NodeMobility<'_> {
    type Item = Segment;

    fn next(&mut self) -> Option<Segment> {
        while self.pending.is_empty() {
            self.decide();
        }
        self.pending.pop_front()
    }
}

/// Forward-only position lookup over a node's segment stream.
pub struct Cursor<'a> {
    stream: NodeMobility<'a>,
    current: Segment,
}

impl<'a> Cursor<'a> {
    pub fn new(mut stream: NodeMobility<'a>) -> Self {
        let current = stream.next().expect("unbounded stream");
        Cursor { stream, current }
    }

    /// Segment in force at `t`; calls must use non-decreasing `t`.
    pub fn at(&mut self, t: f64) -> &Segment {
        while self.current.t1 <= t {
            self.current = self.stream.next().expect("unbounded stream");
        }
        &self.current
    }

    pub fn position(&mut self, t: f64) -> Point {
        self.at(t).position(t)
    }
}

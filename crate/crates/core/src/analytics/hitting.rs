use serde::Serialize;

use super::view::{OccupancyView, PeriodView};
use crate::error::{Error, Result};
use crate::geometry::{build_arrangement, Rect};

/// Per-second chance of coming within `k` of a fixed target in one period,
/// given which of the period's communities contain the target.
pub fn unit_hitting_probability(period: &PeriodView, inside: &[bool], k: f64) -> f64 {
    period
        .states
        .iter()
        .zip(inside)
        .filter(|(_, inside)| **inside)
        .map(|(s, _)| s.p_move * 2.0 * k * s.mean_speed() / s.area())
        .sum()
}

/// `1 - (1 - p)^n`, accurate for tiny `p`.
pub fn compound(p: f64, n: f64) -> f64 {
    if p >= 1.0 {
        1.0
    } else if p <= 0.0 {
        0.0
    } else {
        -(n * (-p).ln_1p()).exp_m1()
    }
}

/// One period's share of a cycle-level first-event computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodEvent {
    pub duration: f64,
    /// Unit-time event probability.
    pub unit: f64,
    /// Probability of at least one event during the period.
    pub period: f64,
    /// Probability that the first event of a cycle falls in this period.
    pub first_share: f64,
    /// Expected time to the event given it first happens in this period.
    pub conditional_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleEvent {
    pub periods: Vec<PeriodEvent>,
    /// Probability of at least one event per cycle.
    pub cycle: f64,
    /// Expected time to the first event, `+inf` if impossible.
    pub expected_time: f64,
}

/// How the wait inside the period of the first event is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum InPeriodWait {
    /// `1 / p`, the untruncated geometric mean. Accurate only when the
    /// period is much longer than `1 / p`.
    #[default]
    Geometric,
    /// Mean of the event time conditioned on falling inside the period.
    Truncated,
}

impl InPeriodWait {
    fn wait(self, p: f64, duration: f64) -> f64 {
        match self {
            InPeriodWait::Geometric => 1.0 / p,
            InPeriodWait::Truncated => {
                if p >= 1.0 {
                    return 1.0;
                }
                let rate = -(-p).ln_1p();
                let x = rate * duration;
                if x < 1e-6 {
                    duration * (0.5 - x / 12.0)
                } else {
                    1.0 / rate - duration / x.exp_m1()
                }
            }
        }
    }
}

/// Expected first-event time for a cyclic schedule with constant unit-time
/// probabilities per period: whole failed cycles, the periods before the
/// successful one, and the wait inside it.
pub fn cycle_event(durations: &[f64], unit: &[f64], wait: InPeriodWait) -> CycleEvent {
    let per: Vec<f64> = durations.iter().zip(unit).map(|(d, p)| compound(*p, *d)).collect();
    let miss: f64 = per.iter().map(|p| 1.0 - p).product();
    let cycle = 1.0 - miss;
    let total: f64 = durations.iter().sum();
    let mut periods = Vec::with_capacity(durations.len());
    let mut survive = 1.0;
    let mut before = 0.0;
    let mut expected = 0.0;
    for ((d, p), pp) in durations.iter().zip(unit).zip(&per) {
        let first_share = if cycle > 0.0 { survive * pp / cycle } else { 0.0 };
        let conditional_time = if *p > 0.0 && cycle > 0.0 {
            total * (1.0 / cycle - 1.0) + before + wait.wait(*p, *d)
        } else {
            f64::INFINITY
        };
        if first_share > 0.0 {
            expected += first_share * conditional_time;
        }
        periods.push(PeriodEvent {
            duration: *d,
            unit: *p,
            period: *pp,
            first_share,
            conditional_time,
        });
        survive *= 1.0 - pp;
        before += d;
    }
    CycleEvent {
        periods,
        cycle,
        expected_time: if cycle > 0.0 { expected } else { f64::INFINITY },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitCell {
    pub area: f64,
    pub probability: f64,
    /// `membership[t][j]`: target inside community `j` of period `t`.
    pub membership: Vec<Vec<bool>>,
    pub event: CycleEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingReport {
    pub node: String,
    pub wait: InPeriodWait,
    pub range: f64,
    pub ht: f64,
    pub cells: Vec<HitCell>,
    pub warnings: Vec<String>,
}

impl HittingReport {
    /// One row per (cell, period).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("cell,probability,period,p_h,p_H,first_share,conditional_ht,cell_p,cell_ht\n");
        for (i, c) in self.cells.iter().enumerate() {
            for (t, p) in c.event.periods.iter().enumerate() {
                s.push_str(&format!(
                    "{i},{},{t},{},{},{},{},{},{}\n",
                    c.probability, p.unit, p.period, p.first_share, p.conditional_time, c.event.cycle, c.event.expected_time
                ));
            }
        }
        s
    }
}

/// Expected time for the node to come within `k` of a target placed
/// uniformly on the field, split over the target/community arrangement.
pub fn hitting_time(view: &OccupancyView, k: f64) -> Result<HittingReport> {
    hitting_time_with(view, k, InPeriodWait::Geometric)
}

pub fn hitting_time_with(view: &OccupancyView, k: f64, wait: InPeriodWait) -> Result<HittingReport> {
    if !(k > 0.0) {
        return Err(Error::InvalidArgument(format!("transmission range must be positive, got {k}")));
    }
    let rects: Vec<Vec<Rect>> = view.periods.iter().map(|p| p.states.iter().map(|s| s.rect).collect()).collect();
    let arrangement = build_arrangement(&rects, view.field.edge_length)?;
    let durations = view.durations();
    let mut warnings = Vec::new();
    let mut cells = Vec::with_capacity(arrangement.cells.len());
    let mut ht = 0.0;
    let mut reachable = 0.0;
    for cell in &arrangement.cells {
        let unit: Vec<f64> = view
            .periods
            .iter()
            .zip(&cell.membership)
            .map(|(p, m)| unit_hitting_probability(p, m, k))
            .collect();
        let event = cycle_event(&durations, &unit, wait);
        let probability = arrangement.probability(cell);
        for (t, (u, d)) in unit.iter().zip(&durations).enumerate() {
            if wait == InPeriodWait::Geometric && *u > 0.0 && u * d < 1.0 {
                warnings.push(format!(
                    "period {t}: unit hitting probability {u:.3e} times duration {d} is below 1, the in-period wait is approximate"
                ));
            }
        }
        if event.cycle > 0.0 {
            reachable += probability;
        }
        ht += probability * event.expected_time;
        cells.push(HitCell {
            area: cell.area,
            probability,
            membership: cell.membership.clone(),
            event,
        });
    }
    if reachable == 0.0 {
        return Err(Error::NoHitPossible);
    }
    if reachable < 1.0 - 1e-12 {
        warnings.push(format!("{:.3e} of the field can never be hit; hitting time is infinite", 1.0 - reachable));
    }
    warnings.sort();
    warnings.dedup();
    Ok(HittingReport {
        node: view.id.clone(),
        wait,
        range: k,
        ht,
        cells,
        warnings,
    })
}

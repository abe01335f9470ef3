use rand::Rng;
use serde::Serialize;

use super::{Community, FieldSpec, NodeProfile, OnOffPolicy, TimePeriod};
use crate::rng;

/// Mean transitional length from a uniform point of the field back to a
/// local community, as a fraction of the field edge.
pub const ROAMING_TRANSITION_FACTOR: f64 = 0.3826;

/// Monte Carlo sample count for transitional lengths between disjoint communities.
pub const TRANSITIONAL_SAMPLES: usize = 100_000;
const TRANSITIONAL_SEED: u64 = 0x7472_616e_7369_7400;

/// Long-run fraction of time spent moving or pausing in each community, or
/// in transitional epochs, during one period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateProbabilities {
    pub period: usize,
    pub pi: Vec<f64>,
    pub p_move: Vec<f64>,
    pub p_pause: Vec<f64>,
    pub p_tr: f64,
    pub psi: f64,
    /// `l_tr[k][n]`: expected transitional length from community `k` to `n`.
    pub l_tr: Vec<Vec<f64>>,
}

impl StateProbabilities {
    /// Fraction of time in state `j`, moving or paused.
    pub fn p_state(&self, j: usize) -> f64 {
        self.p_move[j] + self.p_pause[j]
    }

    pub fn total(&self) -> f64 {
        self.p_move.iter().sum::<f64>() + self.p_pause.iter().sum::<f64>() + self.p_tr
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionalLength {
    pub mean: f64,
    pub stderr: f64,
}

impl TransitionalLength {
    const ZERO: TransitionalLength = TransitionalLength { mean: 0.0, stderr: 0.0 };
}

/// Expected length of the transitional epoch inserted when a node whose
/// last epoch was in `from` selects `to`.
pub fn expected_transitional_length(
    from: &Community,
    to: &Community,
    field: &FieldSpec,
    samples: usize,
    seed: u64,
) -> TransitionalLength {
    let (fr, tr) = (from.rect(), to.rect());
    if tr.contains_rect(&fr) {
        return TransitionalLength::ZERO;
    }
    if from.is_roaming {
        return TransitionalLength {
            mean: ROAMING_TRANSITION_FACTOR * field.edge_length,
            stderr: 0.0,
        };
    }
    let mut r = rng::stream(seed, rng::AUX_SPACE | 0x7472);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let p = fr.lerp(r.random(), r.random());
        // the end point may already sit inside an overlapping target
        let d = if tr.contains(p) {
            0.0
        } else {
            p.distance(tr.lerp(r.random(), r.random()))
        };
        sum += d;
        sum_sq += d * d;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    TransitionalLength {
        mean,
        stderr: (var / n).sqrt(),
    }
}

/// Occupancy probabilities from their ingredients: stationary epoch
/// probabilities, transition matrix, mean move time and mean pause per
/// community, transitional lengths and the mean speed of each source
/// community.
pub fn occupancy_from_parts(
    period: usize,
    pi: &[f64],
    transition: &[Vec<f64>],
    move_time: &[f64],
    mean_pause: &[f64],
    l_tr: Vec<Vec<f64>>,
    mean_speed: &[f64],
) -> StateProbabilities {
    let s = pi.len();
    let tr_time: Vec<f64> = (0..s)
        .map(|k| (0..s).map(|n| transition[k][n] * l_tr[k][n]).sum::<f64>() / mean_speed[k])
        .collect();
    let psi: f64 = (0..s).map(|k| pi[k] * (move_time[k] + mean_pause[k] + tr_time[k])).sum();
    StateProbabilities {
        period,
        pi: pi.to_vec(),
        p_move: (0..s).map(|j| pi[j] * move_time[j] / psi).collect(),
        p_pause: (0..s).map(|j| pi[j] * mean_pause[j] / psi).collect(),
        p_tr: (0..s).map(|k| pi[k] * tr_time[k]).sum::<f64>() / psi,
        psi,
        l_tr,
    }
}

pub fn state_probabilities(profile: &NodeProfile, t: usize) -> StateProbabilities {
    let period = &profile.schedule[t];
    let cs = &period.communities;
    let l_tr: Vec<Vec<f64>> = cs
        .iter()
        .map(|from| {
            cs.iter()
                .map(|to| {
                    expected_transitional_length(&from.community, &to.community, &profile.field, TRANSITIONAL_SAMPLES, TRANSITIONAL_SEED).mean
                })
                .collect()
        })
        .collect();
    let move_time: Vec<f64> = cs.iter().map(|c| c.mean_move_time()).collect();
    let pause: Vec<f64> = cs.iter().map(|c| c.mean_pause()).collect();
    let speed: Vec<f64> = cs.iter().map(|c| c.mean_speed()).collect();
    occupancy_from_parts(t, period.stationary(), &period.transition, &move_time, &pause, l_tr, &speed)
}

/// Probability that the node is observable while in community `j` of `period`.
pub fn on_probability(policy: &OnOffPolicy, period: &TimePeriod, t: usize, j: usize) -> f64 {
    let c = &period.communities[j];
    let (pause, moving) = (c.mean_pause(), c.mean_move_time());
    match policy {
        OnOffPolicy::AlwaysOn => 1.0,
        OnOffPolicy::OnWhenPaused => pause / (pause + moving),
        OnOffPolicy::OnWhenMoving => moving / (pause + moving),
        OnOffPolicy::FixedProb(p) => p[t][j],
    }
}

/// Height of the re-appearance peak at a lag of whole schedule cycles:
/// the time-weighted chance of being observed in the same community twice.
pub fn reappearance_peak(profile: &NodeProfile) -> f64 {
    let cycle = profile.cycle_duration();
    profile
        .schedule
        .iter()
        .enumerate()
        .map(|(t, period)| {
            let sp = state_probabilities(profile, t);
            let inner: f64 = (0..period.len())
                .map(|j| {
                    let on = on_probability(&profile.onoff, period, t, j);
                    (sp.p_state(j) * on).powi(2)
                })
                .sum();
            period.duration / cycle * inner
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::model::{PeriodCommunity, SpeedRange};
    use proptest::prelude::*;

    fn field() -> FieldSpec {
        FieldSpec::new(1000.0).unwrap()
    }

    fn pc(c: Community, l: f64, dmax: f64, v: f64) -> PeriodCommunity {
        PeriodCommunity {
            community: c,
            mean_epoch_length: l,
            max_pause: dmax,
            speed: SpeedRange::new(v, v),
        }
    }

    /// Local 100 m community inside the roaming field, pi = (5/7, 2/7).
    fn two_state(dmax_local: f64) -> NodeProfile {
        let f = field();
        let local = Community::centered("l", Point::new(500.0, 500.0), 100.0, &f).unwrap();
        let period = TimePeriod::new(
            1.0e4,
            vec![pc(local, 80.0, dmax_local, 10.0), pc(Community::roaming(&f), 520.0, 50.0, 10.0)],
            vec![vec![0.8, 0.2], vec![0.5, 0.5]],
        )
        .unwrap();
        NodeProfile::new("a", f, vec![period], OnOffPolicy::AlwaysOn).unwrap()
    }

    #[test]
    fn roaming_only_without_pause_always_moves() {
        let f = field();
        let period = TimePeriod::new(100.0, vec![pc(Community::roaming(&f), 500.0, 0.0, 10.0)], vec![vec![1.0]]).unwrap();
        let p = NodeProfile::new("r", f, vec![period], OnOffPolicy::AlwaysOn).unwrap();
        let sp = state_probabilities(&p, 0);
        assert_eq!(sp.p_move, vec![1.0]);
        assert_eq!(sp.p_pause, vec![0.0]);
        assert_eq!(sp.p_tr, 0.0);
    }

    #[test]
    fn two_state_reference_values() {
        let sp = state_probabilities(&two_state(100.0), 0);
        assert!((sp.pi[0] - 5.0 / 7.0).abs() < 1e-12);
        assert!((sp.l_tr[1][0] - 382.6).abs() < 1e-9);
        assert_eq!(sp.l_tr[0][1], 0.0);
        // hand evaluation: psi = 5/7 (8 + 50) + 2/7 (52 + 25 + 0.5 * 38.26)
        let psi = 5.0 / 7.0 * 58.0 + 2.0 / 7.0 * (77.0 + 0.5 * 38.26);
        assert!((sp.psi - psi).abs() < 1e-9);
        assert!((sp.psi - 68.894).abs() < 5e-4);
        assert!((sp.p_move[0] - 0.0829).abs() < 5e-5);
        assert!((sp.p_pause[0] - 0.5184).abs() < 5e-5);
        assert!((sp.p_move[1] - 0.2157).abs() < 5e-5);
        assert!((sp.p_pause[1] - 0.1037).abs() < 5e-5);
        assert!((sp.p_tr - 0.0793).abs() < 5e-5);
        assert!((sp.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn longer_pauses_shift_time_from_moving_to_pausing() {
        let base = state_probabilities(&two_state(100.0), 0);
        let more = state_probabilities(&two_state(200.0), 0);
        assert!(more.p_pause[0] > base.p_pause[0]);
        assert!(more.p_move[0] < base.p_move[0]);
    }

    #[test]
    fn transitional_length_cases() {
        let f = field();
        let local = Community::centered("l", Point::new(500.0, 500.0), 100.0, &f).unwrap();
        let roam = Community::roaming(&f);
        assert_eq!(expected_transitional_length(&local, &roam, &f, 10, 1).mean, 0.0);
        assert!((expected_transitional_length(&roam, &local, &f, 10, 1).mean - 382.6).abs() < 1e-9);
        assert_eq!(expected_transitional_length(&local, &local, &f, 10, 1).mean, 0.0);
    }

    #[test]
    fn transitional_length_between_disjoint_squares() {
        // two 100 m squares with centres 400 m apart; 4-d midpoint
        // quadrature of the mean point distance gives 402.091
        let f = field();
        let a = Community::new("a", 100.0, 100.0, 100.0, &f).unwrap();
        let b = Community::new("b", 500.0, 100.0, 100.0, &f).unwrap();
        let tl = expected_transitional_length(&a, &b, &f, 100_000, 9);
        assert!((tl.mean - 402.091).abs() < 4.0 * tl.stderr + 0.05, "{tl:?}");
    }

    #[test]
    fn on_probability_policies() {
        let p = two_state(100.0);
        let period = &p.schedule[0];
        assert_eq!(on_probability(&OnOffPolicy::AlwaysOn, period, 0, 0), 1.0);
        let paused = on_probability(&OnOffPolicy::OnWhenPaused, period, 0, 0);
        assert!((paused - 50.0 / 58.0).abs() < 1e-12);
        let moving = on_probability(&OnOffPolicy::OnWhenMoving, period, 0, 0);
        assert!((paused + moving - 1.0).abs() < 1e-12);
    }

    #[test]
    fn on_when_moving_without_pauses_is_on() {
        let f = field();
        let period = TimePeriod::new(100.0, vec![pc(Community::roaming(&f), 500.0, 0.0, 10.0)], vec![vec![1.0]]).unwrap();
        assert_eq!(on_probability(&OnOffPolicy::OnWhenMoving, &period, 0, 0), 1.0);
    }

    #[test]
    fn reappearance_single_community() {
        let f = field();
        let period = TimePeriod::new(100.0, vec![pc(Community::roaming(&f), 500.0, 20.0, 10.0)], vec![vec![1.0]]).unwrap();
        let p = NodeProfile::new("r", f, vec![period], OnOffPolicy::AlwaysOn).unwrap();
        assert!((reappearance_peak(&p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reappearance_two_equal_periods() {
        // period 2 splits time evenly between two whole-field states
        let f = field();
        let p1 = TimePeriod::new(100.0, vec![pc(Community::roaming(&f), 500.0, 0.0, 10.0)], vec![vec![1.0]]).unwrap();
        let roam = Community::roaming(&f);
        let p2 = TimePeriod::new(
            100.0,
            vec![pc(roam.clone(), 100.0, 0.0, 10.0), pc(Community { id: "r2".into(), ..roam }, 100.0, 0.0, 10.0)],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        )
        .unwrap();
        let p = NodeProfile::new("x", f, vec![p1, p2], OnOffPolicy::AlwaysOn).unwrap();
        assert!((reappearance_peak(&p) - 0.75).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn scale_invariance(scale in 0.1..10.0f64, pi0 in 0.05..0.95f64, l0 in 10.0..500.0f64, l1 in 10.0..500.0f64,
                            d0 in 0.0..100.0f64, d1 in 0.0..100.0f64, ltr in 0.0..500.0f64) {
            let pi = [pi0, 1.0 - pi0];
            let p = vec![vec![0.5, 0.5], vec![0.25, 0.75]];
            let v = [10.0, 12.0];
            let base = occupancy_from_parts(0, &pi, &p, &[l0 / v[0], l1 / v[1]], &[d0, d1], vec![vec![0.0, 0.0], vec![ltr, 0.0]], &v);
            let scaled = occupancy_from_parts(0, &pi, &p, &[scale * l0 / v[0], scale * l1 / v[1]], &[scale * d0, scale * d1],
                                              vec![vec![0.0, 0.0], vec![scale * ltr, 0.0]], &v);
            prop_assert!((base.total() - 1.0).abs() < 1e-9);
            for j in 0..2 {
                prop_assert!((base.p_move[j] - scaled.p_move[j]).abs() < 1e-12);
                prop_assert!((base.p_pause[j] - scaled.p_pause[j]).abs() < 1e-12);
            }
            prop_assert!((base.p_tr - scaled.p_tr).abs() < 1e-12);
        }
    }
}

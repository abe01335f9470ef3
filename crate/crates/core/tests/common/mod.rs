#![allow(dead_code)]

use tvc::geometry::Point;
use tvc::model::{Community, FieldSpec, NodeProfile, OnOffPolicy, PeriodCommunity, SpeedRange, TimePeriod};

pub const N: f64 = 1000.0;

pub fn field() -> FieldSpec {
    FieldSpec::new(N).unwrap()
}

pub fn state(community: Community, mean_length: f64, max_pause: f64, speed: (f64, f64)) -> PeriodCommunity {
    PeriodCommunity {
        community,
        mean_epoch_length: mean_length,
        max_pause,
        speed: SpeedRange::new(speed.0, speed.1),
    }
}

/// Random-direction mobility over the whole field in one long period.
pub fn roaming(id: &str, mean_length: f64, max_pause: f64, speed: (f64, f64)) -> NodeProfile {
    roaming_with(id, mean_length, max_pause, speed, OnOffPolicy::AlwaysOn)
}

pub fn roaming_with(id: &str, mean_length: f64, max_pause: f64, speed: (f64, f64), onoff: OnOffPolicy) -> NodeProfile {
    let period = TimePeriod::new(1.0e9, vec![state(Community::roaming(&field()), mean_length, max_pause, speed)], vec![vec![1.0]]).unwrap();
    NodeProfile::new(id, field(), vec![period], onoff).unwrap()
}

/// The two-state example: a 100 m local community at the field centre
/// inside the roaming community, stationary law (5/7, 2/7).
pub fn two_state(speed: (f64, f64)) -> NodeProfile {
    let f = field();
    let local = Community::centered("local", Point::new(500.0, 500.0), 100.0, &f).unwrap();
    let period = TimePeriod::new(
        1.0e9,
        vec![state(local, 80.0, 100.0, speed), state(Community::roaming(&f), 520.0, 50.0, speed)],
        vec![vec![0.8, 0.2], vec![0.5, 0.5]],
    )
    .unwrap();
    NodeProfile::new("two-state", f, vec![period], OnOffPolicy::AlwaysOn).unwrap()
}

/// A node that never leaves one small square and never moves.
pub fn parked(id: &str, at: Point) -> NodeProfile {
    let f = field();
    let c = Community::new(id, at.x, at.y, 1e-6, &f).unwrap();
    let period = TimePeriod::new(1.0e9, vec![state(c, 1e-9, 1.0e9, (1.0, 1.0))], vec![vec![1.0]]).unwrap();
    NodeProfile::new(id, f, vec![period], OnOffPolicy::AlwaysOn).unwrap()
}

//! Rectangle arithmetic, the target/community arrangement, torus motion and
//! the relative-speed constant.

mod arrangement;
mod kinematics;
mod rect;

pub use arrangement::{build_arrangement, Arrangement, ScenarioCell, MAX_DISTINCT_RECTS};
pub use kinematics::{mean_relative_speed, relative_speed_factor, KinematicConstants};
pub use rect::{intersection_area, torus_advance, Point, Rect};

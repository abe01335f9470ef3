//! Closed-form node degree, hitting time and meeting time.

mod degree;
mod hitting;
mod meeting;
mod overlap;
mod view;

pub use degree::{average_node_degree, network_degree, pair_degree, pairwise_degree_contribution, DegreeReport, DegreeTerm};
pub use hitting::{
    compound, cycle_event, hitting_time, hitting_time_with, unit_hitting_probability, CycleEvent, HitCell, HittingReport, InPeriodWait,
    PeriodEvent,
};
pub use meeting::{
    mean_relative_speed_of, meeting_time, meeting_time_with, unit_meeting_probability, MeetingReport, RELATIVE_SPEED_SAMPLES,
};
pub use overlap::{estimate_overlap_probability, OverlapEstimate};
pub use view::{align, Interval, OccupancyView, PeriodView, StateView};

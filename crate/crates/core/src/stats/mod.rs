//! Empirical measurements on traces and Monte Carlo estimates of hitting
//! and meeting times.

mod ecdf;
mod ingest;
mod montecarlo;
mod trace_stats;

pub use ecdf::Ecdf;
pub use ingest::{ingest_contacts_csv, ingest_csv, ContactEvent};
pub use montecarlo::{
    empirical_hitting_time, empirical_meeting_time, first_hit, first_meeting, phase_fractions, timeout_cap, McEstimate,
    PhaseFractions, DEFAULT_TIMEOUT,
};
pub use trace_stats::{
    contact_report, contacts, empirical_node_degree, reappearance_curve, visiting_preference, ContactReport, DegreeAccumulator,
    NodePreference, RankedPreference, ReappearanceCurve, ReappearanceEstimator, ReappearancePoint, DEFAULT_GRID,
};

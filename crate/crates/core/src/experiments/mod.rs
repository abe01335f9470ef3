//! Case studies built on the model: epidemic spread and geographic
//! forwarding.

mod epidemic;
mod routing;
mod si;

pub use epidemic::{contact_rates, epidemic_simulate};
pub use routing::{greedy_forwarding_success, greedy_route, nodes_needed, snapshot_times, Population, RoutingResult};
pub use si::{logistic, si_solve, EpidemicCurve, SiParams, HALVING_TOLERANCE};

//! Time-variant community (TVC) mobility toolkit.
//!
//! The crate is split along the lines of the work it does:
//!
//! * [`model`] holds node profiles, configuration loading and the per-period
//!   state-occupancy probabilities that the rest of the analysis builds on.
//! * [`geometry`] has the rectangle arithmetic, the target/community
//!   arrangement used for hitting-time sub-cases, torus kinematics and the
//!   relative-speed constant.
//! * [`simulator`] generates traces from profiles.
//! * [`analytics`] evaluates the closed-form node degree, hitting time and
//!   meeting time.
//! * [`stats`] measures the same quantities (and a few trace statistics) on
//!   generated or ingested traces, including the Monte Carlo harnesses.
//! * [`experiments`] contains the epidemic-routing and geographic-forwarding
//!   case studies.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod model;
pub mod simulator;
pub mod stats;

pub mod rng;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Trace generation: epochs, transitional epochs, pauses and period
//! boundaries, sampled on a fixed time grid.

mod emit;
mod mobility;
mod trace;

pub use emit::{emit, write_csv, write_metadata, write_ns2, Format};
pub use mobility::{choose, sample_epoch, Cursor, Epoch, EpochKind, NodeMobility, Phase, Segment, EPOCH_TRUNCATION};
pub use trace::{generate_trace, profile_digest, NodeTrack, RunSpec, Sample, SampleState, Snapshot, Snapshots, Trace, TraceMeta};

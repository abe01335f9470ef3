//! Deterministic random streams.
//!
//! Every stochastic component draws from a ChaCha8 stream keyed by the run
//! seed and a stream id, so adding a node or an iteration never perturbs the
//! draws of another one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Stream id spaces; the high bits keep the families apart.
pub const NODE_SPACE: u64 = 0;
pub const PLACEMENT_SPACE: u64 = 1 << 60;
pub const ITERATION_SPACE: u64 = 2 << 60;
pub const AUX_SPACE: u64 = 3 << 60;

pub fn stream(seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn node_stream(seed: u64, node: usize) -> Stream {
    stream(seed, NODE_SPACE | node as u64)
}

/// Derives an independent 64-bit seed for Monte Carlo iteration `i`.
pub fn iteration_seed(seed: u64, i: u64) -> u64 {
    use rand::RngCore;
    stream(seed, ITERATION_SPACE | i).next_u64()
}

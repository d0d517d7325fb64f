//! Deterministic seed derivation.
//!
//! Every trial, instance and solve in this crate draws from its own
//! `ChaCha8Rng` seeded by [`derive_seed`]. The derived seed depends only on the
//! master seed, a stream label and an index, so results do not change with the
//! order or the thread on which trials are executed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One round of the SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `derive_seed(master, stream, index) = mix(mix(mix(master) ^ stream) ^ index)`
/// where `mix` is the SplitMix64 finalizer.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    mix(mix(mix(master) ^ stream) ^ index)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream labels keep seeds for different purposes from colliding.
pub mod streams {
    pub const STOPPING_TRIAL: u64 = 1;
    pub const SLOPE_TRIAL: u64 = 2;
    pub const GRAPH_INSTANCE: u64 = 3;
    pub const COLORING_SOLVE: u64 = 4;
    pub const OUTCOME_SAMPLES: u64 = 5;
    pub const KNAPSACK: u64 = 6;
}

//! Deterministic seed derivation.
//!
//! Every random stream in a run is keyed by `(base seed, stream tag, index)`
//! so results do not depend on evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used across the crate.
pub mod stream {
    pub const SPLIT: u64 = 0x5350_4c49;
    pub const MODEL: u64 = 0x4d4f_4445;
    pub const BOOTSTRAP: u64 = 0x424f_4f54;
    pub const FEATURES: u64 = 0x4645_4154;
    pub const NOISE: u64 = 0x4e4f_4953;
    pub const REPETITION: u64 = 0x5245_5045;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a stream tag and an index into a fresh seed.
pub fn derive(base: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(stream)).wrapping_add(index))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(base: u64, stream: u64, index: u64) -> ChaCha8Rng {
    rng(derive(base, stream, index))
}

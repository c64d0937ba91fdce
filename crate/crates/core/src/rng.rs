//! Seed derivation for reproducible parallel computation.
//!
//! All randomized stages draw from ChaCha8 streams. Parallel units (genes,
//! replicates) get independent substreams via `substream(seed, index)`, so
//! results never depend on scheduling or thread count. Distinct stages within
//! one unit derive their seeds with `derive(seed, tag)` so that, for example,
//! network generation and expression sampling never share a stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Substream rule for indexed parallel units: `seed XOR index`.
pub fn substream(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// Stage-tagged seed derivation (splitmix64 of seed + tag * golden ratio).
pub fn derive(seed: u64, tag: u64) -> u64 {
    splitmix64(seed.wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Deterministic RNG for a given seed.
pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

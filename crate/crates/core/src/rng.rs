//! Seeded randomness. Every stochastic step takes one of these explicitly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The project-wide generator: ChaCha with 8 rounds, platform independent.
pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent child seed for a named stream (e.g. sequence `k`).
///
/// SplitMix64 finalizer over `seed ^ stream`, so neighbouring streams do not
/// produce correlated ChaCha keys.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

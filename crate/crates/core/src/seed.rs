//! Seed derivation for reproducible sub-streams.
//!
//! Every random decision in a run (terminal placement, fading draws, network
//! init, exploration noise, batch sampling) pulls from its own ChaCha stream
//! derived from the run seed, so adding draws to one consumer never perturbs
//! another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives a child seed from `seed` for the given `stream` label.
///
/// SplitMix64 finalizer over the xored pair; cheap and well-distributed.
pub fn derive(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A seeded generator for the derived sub-stream.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, stream))
}

//! Deterministic randomness.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`),
//! whose output stream is fixed by the algorithm and identical on every
//! platform. A 64-bit seed is expanded to the 32-byte ChaCha key with
//! SplitMix64: the key is the little-endian concatenation of the first four
//! SplitMix64 outputs started from the seed.
//!
//! Derived streams (try `i` of a sampler, subset sample `i`, ...) use
//! `derive_seed(seed, i) = mix64(seed ^ mix64(i + 1))`, where `mix64` is the
//! SplitMix64 finalizer.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(1)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform integer in `0..bound` by rejection on the top of the range.
pub fn below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % bound;
        }
    }
}

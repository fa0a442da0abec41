//! Deterministic seed derivation.
//!
//! All randomness in this crate flows from explicit 64-bit seeds. Child seeds
//! are derived with a fixed splittable construction: `mix(seed, i)` applies
//! the splitmix64 finalizer to `seed XOR i * 0x9E3779B97F4A7C15`. The same
//! seed always yields the same stream, on every platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Derive the `index`-th child seed of `seed` (splitmix64 finalizer).
pub fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic RNG seeded from a 64-bit seed. The 256-bit ChaCha key is
/// filled from `mix(seed, 0..4)` so the expansion is fully specified here.
pub fn rng(seed: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, i) in key.chunks_exact_mut(8).zip(0u64..) {
        chunk.copy_from_slice(&mix(seed, i).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw from `0..bound` by rejection (no modulo bias).
pub fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0, "uniform_below: bound must be positive");
    // Accept v in [2^64 mod bound, 2^64), a range whose size is a multiple of bound.
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let v = rng.next_u64();
        if v >= threshold {
            return v % bound;
        }
    }
}

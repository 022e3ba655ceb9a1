//! Per-replication seed derivation.
//!
//! ```text
//! seed(base, r) = mix64(base + (r + 1) * 0x9E3779B97F4A7C15)   (mod 2^64)
//! mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB;
//!           z ^= z >> 31
//! ```
//!
//! `mix64` is the SplitMix64 finaliser. Multiplication by an odd constant,
//! the offset by `base` and `mix64` are all bijections on `u64`, so the
//! seeds of distinct replications under one base are pairwise distinct.

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replication_seed(base_seed: u64, replication: u64) -> u64 {
    mix64(base_seed.wrapping_add(replication.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

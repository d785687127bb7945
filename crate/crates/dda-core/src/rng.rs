//! Seedable, splittable randomness.
//!
//! Every stochastic component draws from a ChaCha8 stream derived from a
//! single run seed. Subseeds are produced by hashing the parent seed with a
//! string tag (splitmix64 over the tag bytes), so independent components
//! (splits, epochs, augmentation) get decorrelated streams that are stable
//! across platforms and runs.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate; named so configs can record it.
pub const GENERATOR_NAME: &str = "chacha8";

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from `seed` and a tag. Deterministic; different tags
/// give statistically independent streams.
pub fn subseed(seed: u64, tag: &str) -> u64 {
    let mut h = splitmix64(seed);
    for &b in tag.as_bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    h
}

/// Child seed keyed by a tag and an index (epoch number, image index, ...).
pub fn subseed_indexed(seed: u64, tag: &str, index: u64) -> u64 {
    splitmix64(subseed(seed, tag) ^ splitmix64(index))
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

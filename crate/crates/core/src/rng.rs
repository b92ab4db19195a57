//! Seed management.
//!
//! Each random object is generated from a single `u64` seed fed to a ChaCha8
//! stream cipher. Replica seeds are derived from `(master seed, tag, index)`
//! by a keyed mixing function, so a replica's randomness never depends on
//! which thread produced it or in which order replicas were scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type LabRng = ChaCha8Rng;

/// Builds the generator for a seed.
pub fn rng_from_seed(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a hash of a tag; stable across platforms and releases.
fn tag_hash(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed for replica `index` of the stream named `tag` under `master`.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    mix64(mix64(mix64(master) ^ tag_hash(tag)) ^ index)
}

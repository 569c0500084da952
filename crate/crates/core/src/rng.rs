//! Seed derivation.
//!
//! Every random stage draws from its own generator derived from the run seed
//! and a `(stage, key)` pair, so results never depend on the order in which
//! classes or trees are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StageRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derive a child seed for `(stage, key)`.
pub fn derive_seed(seed: u64, stage: &str, key: &str) -> u64 {
    let mut s = splitmix64(seed);
    s = splitmix64(s ^ fnv1a(stage.as_bytes()));
    splitmix64(s ^ fnv1a(key.as_bytes()))
}

/// Derive a child seed for an integer counter, e.g. a tree or trial index.
pub fn derive_seed_n(seed: u64, stage: &str, n: u64) -> u64 {
    splitmix64(derive_seed(seed, stage, "") ^ splitmix64(n))
}

pub fn stage_rng(seed: u64, stage: &str, key: &str) -> StageRng {
    StageRng::seed_from_u64(derive_seed(seed, stage, key))
}

pub fn stage_rng_n(seed: u64, stage: &str, n: u64) -> StageRng {
    StageRng::seed_from_u64(derive_seed_n(seed, stage, n))
}

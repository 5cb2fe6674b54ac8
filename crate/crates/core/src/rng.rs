//! Seed derivation and the generator used by every stochastic routine.
//!
//! All randomness flows from a master seed through [`derive_seed`]; there is
//! no global generator. The generator is ChaCha8, whose output stream is fixed
//! by the `rand_chacha` crate and does not depend on the platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name and version tag of the generator, recorded in experiment manifests.
pub const GENERATOR_NAME: &str = "chacha8/splitmix64-derive/v1";

pub type SimRng = ChaCha8Rng;

/// Stable 64-bit mixing of `(master, index)` (SplitMix64 finalizer applied twice).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let a = mix(master.wrapping_add(0x9e37_79b9_7f4a_7c15));
    mix(a ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(0x632b_e59b_d9b4_e019))
}

/// Derive a seed from a path of indices, e.g. `(master, [unit, trial])`.
pub fn derive_path(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(master, |s, &i| derive_seed(s, i))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream(master: u64, index: u64) -> SimRng {
    rng_from_seed(derive_seed(master, index))
}

//! Deterministic randomness.
//!
//! Every stochastic component (encoder coefficients, window selection,
//! per-receiver erasures, Monte-Carlo trials) draws from its own ChaCha8
//! stream. Streams are addressed by a path of integer labels below one
//! 64-bit master seed, so adding or removing a consumer never shifts the
//! draws seen by another one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream labels. The first element of every derivation path is one of these.
pub mod label {
    pub const COEFFICIENTS: u64 = 0x01;
    pub const WINDOWS: u64 = 0x02;
    pub const ERASURE: u64 = 0x03;
    pub const SOURCE_DATA: u64 = 0x04;
    pub const TRIAL: u64 = 0x05;
    pub const ENCODER: u64 = 0x06;
    pub const INSTANCE: u64 = 0x07;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn path_hash(path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(path.len() as u64), |h, &p| splitmix64(h ^ splitmix64(p)))
}

/// Derives a child seed from `master` and a label path.
pub fn derive(master: u64, path: &[u64]) -> u64 {
    splitmix64(master ^ path_hash(path).rotate_left(17))
}

/// Returns the independent RNG stream addressed by `path` under `master`.
///
/// The master seed keys the ChaCha cipher and the path selects the stream
/// counter, so streams under one master never overlap.
pub fn stream(master: u64, path: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(path_hash(path));
    rng
}

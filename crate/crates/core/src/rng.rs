//! Counter-based seeding.
//!
//! Every random stream in the crate is a [`Pcg64Mcg`] whose 128-bit state is a
//! pure hash of a master seed and a short list of tags (vertex keys, trial
//! indices, query counters). Streams never depend on the order in which they
//! are created.

use rand_pcg::Pcg64Mcg;

pub type StreamRng = Pcg64Mcg;

#[inline]
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Order-sensitive combination of a running key with one more word.
#[inline]
pub fn mix(acc: u64, x: u64) -> u64 {
    splitmix64(acc.rotate_left(23) ^ splitmix64(x))
}

pub fn mix_all(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(seed), |acc, &t| mix(acc, t))
}

pub fn stream(seed: u64, tags: &[u64]) -> StreamRng {
    let lo = mix_all(seed, tags);
    let hi = splitmix64(lo ^ 0x5851_F42D_4C95_7F2D);
    Pcg64Mcg::new(((hi as u128) << 64) | lo as u128 | 1)
}

/// Uniform value in `[0, 1)` determined by the hash of `seed` and `tags`.
pub fn unit(seed: u64, tags: &[u64]) -> f64 {
    (mix_all(seed, tags) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed of the `index`-th trial of an experiment.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    mix_all(seed, &[0x7472_6961_6c00_0000, index])
}

//! Deterministic seed expansion.
//!
//! A master seed is turned into independent per-trial streams by hashing the
//! trial index into it. Trial `i` always sees the same stream no matter which
//! thread runs it or in which order trials are scheduled.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The generator used for every random quantity in the crate.
pub type TrialRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for stream `index` of master seed `seed`.
#[inline]
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_mul(GOLDEN_GAMMA) ^ 0x5eed))
}

/// Generator for stream `index` of master seed `seed`.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    TrialRng::seed_from_u64(sub_seed(seed, index))
}

/// Generator seeded directly from `seed`.
pub fn rng_from_seed(seed: u64) -> TrialRng {
    TrialRng::seed_from_u64(seed)
}

/// Complex Gaussian with independent real and imaginary parts of variance
/// 1/2 each, so that `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

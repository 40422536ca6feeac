//! Seeded sampling helpers.
//!
//! Every randomized routine in the crate draws from a ChaCha8 stream seeded
//! explicitly by the caller, so reports are reproducible across runs and
//! platforms.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fmath;

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller; one value per call keeps usage simple.
pub(crate) fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    // Guard against u1 = 0; the shift keeps u1 in (0, 1].
    let u1 = if u1 <= 0.0 { f64::MIN_POSITIVE } else { u1 };
    fmath::sqrt(-2.0 * fmath::ln(u1)) * fmath::cos(core::f64::consts::TAU * u2)
}

pub(crate) fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Nonzero direction vector (unit Euclidean norm).
pub(crate) fn unit_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, n);
        let norm = crate::linalg::norm2(&v);
        if norm > 1e-8 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

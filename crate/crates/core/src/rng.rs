//! Counter-keyed deterministic randomness.
//!
//! Every random draw in the crate comes from [`keyed_rng`]: a ChaCha8
//! stream selected by `(seed, index)`. Work split across any number of
//! workers therefore reproduces a sequential run bit for bit.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn keyed_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard normal draw (Box-Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

/// Isotropic Gaussian vector, redrawn until its norm is safely positive.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        if crate::vector::norm(&v) > 1e-6 {
            return v;
        }
    }
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let v = gaussian_vector(rng, dim);
    let n = crate::vector::norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

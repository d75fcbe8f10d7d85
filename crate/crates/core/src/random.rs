//! Seeded random matrix generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{c, orthonormalize, CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent seed for sub-task `k` of a seeded job.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    // SplitMix64 finalizer.
    let mut z = seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn normal<R: Rng>(r: &mut R) -> f64 {
    r.sample(StandardNormal)
}

pub fn complex_normal<R: Rng>(r: &mut R) -> C64 {
    c(normal(r), normal(r))
}

pub fn random_cmatrix<R: Rng>(r: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(r))
}

/// Complex matrix with zero imaginary parts.
pub fn random_real_cmatrix<R: Rng>(r: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(normal(r), 0.0))
}

pub fn random_unitary<R: Rng>(r: &mut R, n: usize) -> CMatrix {
    orthonormalize(&random_cmatrix(r, n, n))
}

/// Random complex number with modulus in `[lo, hi]`.
pub fn random_modulus<R: Rng>(r: &mut R, lo: f64, hi: f64) -> C64 {
    let rad = r.random_range(lo..=hi);
    let theta = r.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(rad, theta)
}

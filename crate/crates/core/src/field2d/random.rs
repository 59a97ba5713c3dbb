//! Seeded random fields for tests, verification suites and data generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rustfft::num_complex::Complex64;

use super::field::{Field2D, VectorField2D};
use super::grid::Grid2D;
use super::ops::{leray_project, perp_gradient};

/// Counter-based generator used everywhere a seed is accepted.
pub type SeededRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Zero-mean real field whose coefficient at mode `k` is
/// `envelope(|k|) * (uniform complex in the unit square, centered)`.
/// Modes where the envelope is zero stay exactly zero.
pub fn random_field(grid: &Grid2D, rng: &mut impl Rng, envelope: impl Fn(f64) -> f64) -> Field2D {
    let mut c = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
    for (i, z) in c.iter_mut().enumerate().skip(1) {
        let re: f64 = rng.random::<f64>() - 0.5;
        let im: f64 = rng.random::<f64>() - 0.5;
        let w = envelope(grid.k_mag(i));
        if w != 0.0 {
            *z = Complex64::new(re, im) * w;
        }
    }
    Field2D::from_spectral(grid, c).expect("sized by grid")
}

/// Random field with flat spectrum on the integer lattice box `|k_i| < cutoff`
/// (in lattice units), zero mean.
pub fn random_band_limited(grid: &Grid2D, rng: &mut impl Rng, cutoff: i64) -> Field2D {
    let g = grid.clone();
    let mut c = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
    for (i, z) in c.iter_mut().enumerate().skip(1) {
        let re: f64 = rng.random::<f64>() - 0.5;
        let im: f64 = rng.random::<f64>() - 0.5;
        let (px, py) = g.lattice(i);
        if px < cutoff && py.abs() < cutoff {
            *z = Complex64::new(re, im);
        }
    }
    Field2D::from_spectral(grid, c).expect("sized by grid")
}

pub fn random_vector(grid: &Grid2D, rng: &mut impl Rng, cutoff: i64) -> VectorField2D {
    VectorField2D { x: random_band_limited(grid, rng, cutoff), y: random_band_limited(grid, rng, cutoff) }
}

/// Random divergence-free field from a random stream function.
pub fn random_solenoidal(grid: &Grid2D, rng: &mut impl Rng, cutoff: i64) -> VectorField2D {
    leray_project(&perp_gradient(&random_band_limited(grid, rng, cutoff)))
}

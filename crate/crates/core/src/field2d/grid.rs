use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

const TRANSPOSE_BLOCK: usize = 32;

/// Periodic square box `[0, l)^2` sampled on `n x n` points.
///
/// Spectral data is stored as the non-redundant half plane of a real field:
/// `m = n/2 + 1` columns in `kx` (non-negative) by `n` rows in `ky`, laid out
/// `kx`-major so that `index = ix * n + iy`. Coefficients are Fourier-series
/// coefficients, `f(x) = sum_k c_k e^{i k.x}`.
#[derive(Clone)]
pub struct Grid2D {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    l: f64,
    m: usize,
    kx: Vec<f64>,
    ky: Vec<f64>,
    dkx: Vec<f64>,
    dky: Vec<f64>,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Grid2D {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} must be a power of two >= 16")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidGrid(format!("box length l = {l} must be positive")));
        }
        let m = n / 2 + 1;
        let dk = 2.0 * PI / l;
        let half = (n / 2) as i64;
        let kx: Vec<f64> = (0..m).map(|i| dk * i as f64).collect();
        let ky: Vec<f64> = (0..n)
            .map(|j| {
                let s = j as i64;
                dk * if s < half { s } else { s - n as i64 } as f64
            })
            .collect();
        // Odd-order derivatives drop the Nyquist wavenumber so real fields stay real.
        let dkx: Vec<f64> = kx.iter().enumerate().map(|(i, &k)| if i == n / 2 { 0.0 } else { k }).collect();
        let dky: Vec<f64> = ky.iter().enumerate().map(|(j, &k)| if j == n / 2 { 0.0 } else { k }).collect();

        let mut rp = RealFftPlanner::<f64>::new();
        let mut cp = FftPlanner::<f64>::new();
        let inner = GridInner {
            n,
            l,
            m,
            kx,
            ky,
            dkx,
            dky,
            r2c: rp.plan_fft_forward(n),
            c2r: rp.plan_fft_inverse(n),
            fwd: cp.plan_fft_forward(n),
            inv: cp.plan_fft_inverse(n),
        };
        Ok(Self { inner: Arc::new(inner) })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn l(&self) -> f64 {
        self.inner.l
    }

    /// Number of stored `kx` columns, `n/2 + 1`.
    pub fn m(&self) -> usize {
        self.inner.m
    }

    pub fn spacing(&self) -> f64 {
        self.inner.l / self.inner.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Smallest nonzero wavenumber magnitude, `2 pi / l`.
    pub fn k_min(&self) -> f64 {
        2.0 * PI / self.inner.l
    }

    pub fn k_nyquist(&self) -> f64 {
        PI * self.inner.n as f64 / self.inner.l
    }

    /// Time beyond which decay on the torus stops looking algebraic:
    /// `0.1 (l / 2 pi)^2`.
    pub fn torus_horizon(&self) -> f64 {
        let r = self.inner.l / (2.0 * PI);
        0.1 * r * r
    }

    pub fn physical_len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    pub fn spectral_len(&self) -> usize {
        self.inner.m * self.inner.n
    }

    #[inline]
    pub fn spectral_index(&self, ix: usize, iy: usize) -> usize {
        ix * self.inner.n + iy
    }

    /// Inverse of [`Self::spectral_index`].
    #[inline]
    pub fn mode_of(&self, idx: usize) -> (usize, usize) {
        (idx / self.inner.n, idx % self.inner.n)
    }

    #[inline]
    pub fn kx(&self, ix: usize) -> f64 {
        self.inner.kx[ix]
    }

    #[inline]
    pub fn ky(&self, iy: usize) -> f64 {
        self.inner.ky[iy]
    }

    /// Derivative symbol in x (Nyquist column zeroed).
    #[inline]
    pub fn dkx(&self, ix: usize) -> f64 {
        self.inner.dkx[ix]
    }

    #[inline]
    pub fn dky(&self, iy: usize) -> f64 {
        self.inner.dky[iy]
    }

    /// True wavenumber magnitude `|k|` of a stored mode.
    #[inline]
    pub fn k_mag(&self, idx: usize) -> f64 {
        let (ix, iy) = self.mode_of(idx);
        self.inner.kx[ix].hypot(self.inner.ky[iy])
    }

    /// `|k~|^2` built from the derivative symbols; the symbol of `-Laplacian`.
    #[inline]
    pub fn k2_op(&self, idx: usize) -> f64 {
        let (ix, iy) = self.mode_of(idx);
        let (a, b) = (self.inner.dkx[ix], self.inner.dky[iy]);
        a * a + b * b
    }

    /// Signed integer lattice coordinates of a stored mode.
    pub fn lattice(&self, idx: usize) -> (i64, i64) {
        let (ix, iy) = self.mode_of(idx);
        let n = self.inner.n as i64;
        let sy = iy as i64;
        (ix as i64, if sy < n / 2 { sy } else { sy - n })
    }

    /// Parseval weight of a stored column: interior columns stand for
    /// themselves and their conjugate partner.
    #[inline]
    pub fn column_weight(&self, ix: usize) -> f64 {
        if ix == 0 || ix == self.inner.n / 2 {
            1.0
        } else {
            2.0
        }
    }

    /// Whether a mode survives the 2/3 truncation.
    #[inline]
    pub fn retained_two_thirds(&self, idx: usize) -> bool {
        let (px, py) = self.lattice(idx);
        let cut = (self.inner.n / 3) as i64;
        px <= cut && py.abs() <= cut
    }

    /// Whether a mode lies strictly inside the quarter band `|k_i| < n/4`,
    /// where pointwise products of two such fields do not alias.
    #[inline]
    pub fn within_quarter_band(&self, idx: usize) -> bool {
        let (px, py) = self.lattice(idx);
        let cut = (self.inner.n / 4) as i64;
        px < cut && py.abs() < cut
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Forward transform of `n x n` row-major samples (`index = iy * n + ix`).
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let g = &*self.inner;
        let (n, m) = (g.n, g.m);
        assert_eq!(values.len(), n * n, "physical buffer size");
        let mut rows = values.to_vec();
        let mut half = vec![Complex64::new(0.0, 0.0); n * m];
        let r2c = &g.r2c;
        rows.par_chunks_mut(n).zip(half.par_chunks_mut(m)).for_each_init(
            || r2c.make_scratch_vec(),
            |scratch, (inp, out)| {
                r2c.process_with_scratch(inp, out, scratch).expect("r2c sizes");
            },
        );
        let mut spec = vec![Complex64::new(0.0, 0.0); n * m];
        transpose(&half, &mut spec, n, m);
        let fwd = &g.fwd;
        let scale = 1.0 / (n * n) as f64;
        spec.par_chunks_mut(n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); fwd.get_inplace_scratch_len()],
            |scratch, row| {
                fwd.process_with_scratch(row, scratch);
                for c in row.iter_mut() {
                    *c *= scale;
                }
            },
        );
        spec
    }

    /// Inverse of [`Self::forward`].
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let g = &*self.inner;
        let (n, m) = (g.n, g.m);
        assert_eq!(spec.len(), n * m, "spectral buffer size");
        let mut cols = spec.to_vec();
        let inv = &g.inv;
        cols.par_chunks_mut(n).for_each_init(
            || vec![Complex64::new(0.0, 0.0); inv.get_inplace_scratch_len()],
            |scratch, row| inv.process_with_scratch(row, scratch),
        );
        let mut half = vec![Complex64::new(0.0, 0.0); n * m];
        transpose(&cols, &mut half, m, n);
        let mut out = vec![0.0; n * n];
        let c2r = &g.c2r;
        half.par_chunks_mut(m).zip(out.par_chunks_mut(n)).for_each_init(
            || c2r.make_scratch_vec(),
            |scratch, (inp, row)| {
                inp[0].im = 0.0;
                inp[m - 1].im = 0.0;
                c2r.process_with_scratch(inp, row, scratch).expect("c2r sizes");
            },
        );
        out
    }
}

/// `dst[c * rows + r] = src[r * cols + c]` for a `rows x cols` source.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for rb in (0..rows).step_by(TRANSPOSE_BLOCK) {
        for cb in (0..cols).step_by(TRANSPOSE_BLOCK) {
            for r in rb..(rb + TRANSPOSE_BLOCK).min(rows) {
                for c in cb..(cb + TRANSPOSE_BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.l.to_bits() == other.inner.l.to_bits())
    }
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2D").field("n", &self.inner.n).field("l", &self.inner.l).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid2D::new(8, 1.0).is_err());
        assert!(Grid2D::new(48, 1.0).is_err());
        assert!(Grid2D::new(16, 0.0).is_err());
        assert!(Grid2D::new(16, -2.0).is_err());
        assert!(Grid2D::new(16, 2.0 * PI).is_ok());
    }

    #[test]
    fn wavenumber_lattice() {
        let g = Grid2D::new(16, 4.0 * PI).unwrap();
        assert!((g.k_min() - 0.5).abs() < 1e-15);
        assert!((g.ky(15) + 0.5).abs() < 1e-15);
        assert!((g.ky(8) + 4.0).abs() < 1e-15);
        assert_eq!(g.dky(8), 0.0);
        assert!((g.k_nyquist() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn single_mode_forward() {
        let g = Grid2D::new(16, 2.0 * PI).unwrap();
        let n = g.n();
        let vals: Vec<f64> = (0..n * n)
            .map(|i| {
                let (iy, ix) = (i / n, i % n);
                (3.0 * g.x(ix) - 2.0 * g.x(iy)).cos()
            })
            .collect();
        let spec = g.forward(&vals);
        // cos(3x - 2y) = (e^{i(3,-2)x} + e^{i(-3,2)x}) / 2; stored half plane sees (3, -2).
        let idx = g.spectral_index(3, n - 2);
        assert!((spec[idx] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let total: f64 = spec.iter().map(|c| c.norm()).sum();
        assert!((total - 0.5).abs() < 1e-13);
    }
}

use std::borrow::Cow;

use rustfft::num_complex::Complex64;

use super::grid::Grid2D;
use crate::error::{Error, Result};

/// Which representation a field currently holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

#[derive(Clone, Debug)]
enum Repr {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// Real scalar field on a periodic grid, held either as samples or as
/// half-plane Fourier coefficients. Conversions are on demand.
#[derive(Clone, Debug)]
pub struct Field2D {
    grid: Grid2D,
    repr: Repr,
}

impl Field2D {
    pub fn zeros(grid: &Grid2D) -> Self {
        Self { grid: grid.clone(), repr: Repr::Spectral(vec![Complex64::new(0.0, 0.0); grid.spectral_len()]) }
    }

    /// Samples in row-major order, `values[iy * n + ix] = f(x_ix, y_iy)`.
    pub fn from_physical(grid: &Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.physical_len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.physical_len(),
                values.len()
            )));
        }
        Ok(Self { grid: grid.clone(), repr: Repr::Physical(values) })
    }

    /// Half-plane coefficients. The self-conjugate columns `kx = 0` and
    /// `kx = n/2` are symmetrized so the field is real.
    pub fn from_spectral(grid: &Grid2D, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.spectral_len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.spectral_len(),
                coeffs.len()
            )));
        }
        hermitian_symmetrize(grid, &mut coeffs);
        Ok(Self { grid: grid.clone(), repr: Repr::Spectral(coeffs) })
    }

    pub(crate) fn from_spectral_unchecked(grid: &Grid2D, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.spectral_len());
        Self { grid: grid.clone(), repr: Repr::Spectral(coeffs) }
    }

    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let values = (0..n * n).map(|i| f(grid.x(i % n), grid.x(i / n))).collect();
        Self { grid: grid.clone(), repr: Repr::Physical(values) }
    }

    pub fn constant(grid: &Grid2D, c: f64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.spectral_len()];
        coeffs[0] = Complex64::new(c, 0.0);
        Self::from_spectral_unchecked(grid, coeffs)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        match self.repr {
            Repr::Physical(_) => Representation::Physical,
            Repr::Spectral(_) => Representation::Spectral,
        }
    }

    pub fn spectral(&self) -> Cow<'_, [Complex64]> {
        match &self.repr {
            Repr::Spectral(c) => Cow::Borrowed(c),
            Repr::Physical(v) => Cow::Owned(self.grid.forward(v)),
        }
    }

    pub fn physical(&self) -> Cow<'_, [f64]> {
        match &self.repr {
            Repr::Physical(v) => Cow::Borrowed(v),
            Repr::Spectral(c) => Cow::Owned(self.grid.inverse(c)),
        }
    }

    pub fn into_spectral_vec(self) -> Vec<Complex64> {
        match self.repr {
            Repr::Spectral(c) => c,
            Repr::Physical(v) => self.grid.forward(&v),
        }
    }

    pub fn into_physical_vec(self) -> Vec<f64> {
        match self.repr {
            Repr::Physical(v) => v,
            Repr::Spectral(c) => self.grid.inverse(&c),
        }
    }

    pub fn to_spectral(self) -> Self {
        let grid = self.grid.clone();
        Self { repr: Repr::Spectral(self.into_spectral_vec()), grid }
    }

    pub fn to_physical(self) -> Self {
        let grid = self.grid.clone();
        Self { repr: Repr::Physical(self.into_physical_vec()), grid }
    }

    /// Apply a real Fourier multiplier given per stored mode index.
    pub fn multiply_symbol(&self, symbol: impl Fn(usize) -> f64) -> Self {
        let coeffs = self.spectral().iter().enumerate().map(|(i, &c)| c * symbol(i)).collect();
        Self::from_spectral_unchecked(&self.grid, coeffs)
    }

    /// Apply a precomputed real multiplier, one weight per stored mode.
    pub fn multiply_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.grid.spectral_len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} weights, got {}",
                self.grid.spectral_len(),
                weights.len()
            )));
        }
        let coeffs = self.spectral().iter().zip(weights).map(|(&c, &w)| c * w).collect();
        Ok(Self::from_spectral_unchecked(&self.grid, coeffs))
    }

    /// Apply a complex Fourier multiplier that maps real fields to real fields.
    pub(crate) fn map_modes(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coeffs = self.spectral().iter().enumerate().map(|(i, &c)| f(i, c)).collect();
        Self::from_spectral_unchecked(&self.grid, coeffs)
    }

    pub fn scale(&self, s: f64) -> Self {
        match &self.repr {
            Repr::Physical(v) => Self { grid: self.grid.clone(), repr: Repr::Physical(v.iter().map(|x| x * s).collect()) },
            Repr::Spectral(c) => Self::from_spectral_unchecked(&self.grid, c.iter().map(|x| x * s).collect()),
        }
    }

    /// `self + s * other`, computed in the spectral representation unless
    /// both operands are physical.
    pub fn axpy(&self, s: f64, other: &Field2D) -> Result<Self> {
        self.check_grid(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Physical(a), Repr::Physical(b)) => Self {
                grid: self.grid.clone(),
                repr: Repr::Physical(a.iter().zip(b).map(|(x, y)| x + s * y).collect()),
            },
            _ => {
                let a = self.spectral();
                let b = other.spectral();
                Self::from_spectral_unchecked(&self.grid, a.iter().zip(b.iter()).map(|(x, y)| x + y * s).collect())
            }
        })
    }

    pub fn add(&self, other: &Field2D) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Field2D) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn check_grid(&self, other: &Field2D) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.repr {
            Repr::Spectral(c) => c[0].re,
            Repr::Physical(v) => v.iter().sum::<f64>() / v.len() as f64,
        }
    }

    pub fn remove_mean(&self) -> Self {
        let mut c = self.spectral().into_owned();
        c[0] = Complex64::new(0.0, 0.0);
        Self::from_spectral_unchecked(&self.grid, c)
    }

    /// True when every stored value is exactly zero.
    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Spectral(c) => c.iter().all(|z| z.re == 0.0 && z.im == 0.0),
            Repr::Physical(v) => v.iter().all(|&x| x == 0.0),
        }
    }

    /// `L^2` norm over the box, by Parseval when spectral.
    pub fn norm_l2(&self) -> f64 {
        match &self.repr {
            Repr::Spectral(c) => spectral_energy(&self.grid, c).sqrt() * self.grid.l(),
            Repr::Physical(v) => (v.iter().map(|x| x * x).sum::<f64>() * self.grid.cell_area()).sqrt(),
        }
    }

    /// Grid quadrature `(l/n)^{2/p} (sum |f|^p)^{1/p}`; `p = inf` is the max.
    pub fn norm_lp(&self, p: f64) -> f64 {
        if p == 2.0 {
            return self.norm_l2();
        }
        lp_of_samples(&self.physical(), p, self.grid.cell_area())
    }

    /// `L^2` inner product.
    pub fn inner(&self, other: &Field2D) -> Result<f64> {
        self.check_grid(other)?;
        let a = self.spectral();
        let b = other.spectral();
        let g = &self.grid;
        let mut acc = 0.0;
        for (i, (x, y)) in a.iter().zip(b.iter()).enumerate() {
            let (ix, _) = g.mode_of(i);
            acc += g.column_weight(ix) * (x * y.conj()).re;
        }
        Ok(acc * g.l() * g.l())
    }

    pub fn max_abs(&self) -> f64 {
        self.physical().iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.physical()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }

    /// Zero every mode outside the 2/3 band.
    pub fn dealias(&self) -> Self {
        let g = self.grid.clone();
        self.multiply_symbol(|i| if g.retained_two_thirds(i) { 1.0 } else { 0.0 })
    }

    /// Pointwise product followed by 2/3 truncation.
    pub fn product(&self, other: &Field2D) -> Result<Self> {
        Ok(self.product_exact(other)?.dealias())
    }

    /// Pointwise product on the grid with no truncation; alias-free only when
    /// both inputs lie in the quarter band.
    pub fn product_exact(&self, other: &Field2D) -> Result<Self> {
        self.check_grid(other)?;
        let a = self.physical();
        let b = other.physical();
        let v: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
        Ok(Self { grid: self.grid.clone(), repr: Repr::Physical(v) }.to_spectral())
    }

    /// Pointwise map in physical space.
    pub fn map_physical(&self, f: impl Fn(f64) -> f64) -> Self {
        let v = self.physical().iter().map(|&x| f(x)).collect();
        Self { grid: self.grid.clone(), repr: Repr::Physical(v) }
    }

    /// Trigonometric interpolation onto a finer grid of the same box
    /// (zero padding). Nyquist modes of the source are dropped.
    pub fn resample(&self, fine: &Grid2D) -> Result<Self> {
        let (n, nf) = (self.grid.n(), fine.n());
        if fine.l() != self.grid.l() || nf < n {
            return Err(Error::InvalidGrid(format!("cannot resample n = {n} onto n = {nf} (box {} vs {})", self.grid.l(), fine.l())));
        }
        let c = self.spectral();
        let mut out = vec![Complex64::new(0.0, 0.0); fine.spectral_len()];
        let half = (n / 2) as i64;
        for (i, z) in c.iter().enumerate() {
            let (px, py) = self.grid.lattice(i);
            if px == half || py == -half {
                continue;
            }
            let iy = if py >= 0 { py as usize } else { (nf as i64 + py) as usize };
            out[fine.spectral_index(px as usize, iy)] = *z;
        }
        Ok(Self::from_spectral_unchecked(fine, out))
    }

    /// Largest coefficient magnitude among modes where `outside(idx)` holds,
    /// relative to the largest coefficient overall.
    pub fn relative_leakage(&self, outside: impl Fn(usize) -> bool) -> f64 {
        let c = self.spectral();
        let (mut inside_max, mut all_max) = (0.0_f64, 0.0_f64);
        for (i, z) in c.iter().enumerate() {
            let a = z.norm();
            all_max = all_max.max(a);
            if outside(i) {
                inside_max = inside_max.max(a);
            }
        }
        if all_max == 0.0 {
            0.0
        } else {
            inside_max / all_max
        }
    }
}

/// Sum of `|c|^2` over the full plane, from the stored half plane.
pub(crate) fn spectral_energy(grid: &Grid2D, c: &[Complex64]) -> f64 {
    let n = grid.n();
    let mut acc = 0.0;
    for (ix, col) in c.chunks(n).enumerate() {
        let w = grid.column_weight(ix);
        acc += w * col.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    acc
}

pub(crate) fn lp_of_samples(v: &[f64], p: f64, cell_area: f64) -> f64 {
    if p.is_infinite() {
        return v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    }
    let s: f64 = v.iter().map(|x| x.abs().powf(p)).sum();
    (s * cell_area).powf(1.0 / p)
}

fn hermitian_symmetrize(grid: &Grid2D, c: &mut [Complex64]) {
    let n = grid.n();
    for ix in [0, n / 2] {
        let col = &mut c[ix * n..(ix + 1) * n];
        col[0].im = 0.0;
        col[n / 2].im = 0.0;
        for j in 1..n / 2 {
            let avg = (col[j] + col[n - j].conj()) * 0.5;
            col[j] = avg;
            col[n - j] = avg.conj();
        }
    }
}

/// Two-component real vector field; both components share one grid.
#[derive(Clone, Debug)]
pub struct VectorField2D {
    pub x: Field2D,
    pub y: Field2D,
}

impl VectorField2D {
    pub fn new(x: Field2D, y: Field2D) -> Result<Self> {
        x.check_grid(&y)?;
        Ok(Self { x, y })
    }

    pub fn zeros(grid: &Grid2D) -> Self {
        Self { x: Field2D::zeros(grid), y: Field2D::zeros(grid) }
    }

    pub fn grid(&self) -> &Grid2D {
        self.x.grid()
    }

    pub fn components(&self) -> [&Field2D; 2] {
        [&self.x, &self.y]
    }

    pub fn map(&self, f: impl Fn(&Field2D) -> Field2D) -> Self {
        Self { x: f(&self.x), y: f(&self.y) }
    }

    pub fn try_map(&self, f: impl Fn(&Field2D) -> Result<Field2D>) -> Result<Self> {
        Ok(Self { x: f(&self.x)?, y: f(&self.y)? })
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&Field2D, &Field2D) -> Result<Field2D>) -> Result<Self> {
        Ok(Self { x: f(&self.x, &other.x)?, y: f(&self.y, &other.y)? })
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.axpy(s, b))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn to_spectral(self) -> Self {
        Self { x: self.x.to_spectral(), y: self.y.to_spectral() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn norm_l2(&self) -> f64 {
        self.x.norm_l2().hypot(self.y.norm_l2())
    }

    /// `L^p` norm of the pointwise Euclidean magnitude.
    pub fn norm_lp(&self, p: f64) -> f64 {
        if p == 2.0 {
            return self.norm_l2();
        }
        let a = self.x.physical();
        let b = self.y.physical();
        let mag: Vec<f64> = a.iter().zip(b.iter()).map(|(u, v)| u.hypot(*v)).collect();
        lp_of_samples(&mag, p, self.grid().cell_area())
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        Ok(self.x.inner(&other.x)? + self.y.inner(&other.y)?)
    }

    /// Max over the grid of the Euclidean magnitude.
    pub fn max_abs(&self) -> f64 {
        self.norm_lp(f64::INFINITY)
    }

    pub fn dealias(&self) -> Self {
        self.map(|c| c.dealias())
    }

    /// Multiply both components by a scalar field, 2/3 truncated.
    pub fn scalar_product(&self, s: &Field2D) -> Result<Self> {
        self.try_map(|c| s.product(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid2D {
        Grid2D::new(32, 2.0 * PI).unwrap()
    }

    #[test]
    fn round_trip_is_exact_to_rounding() {
        let g = grid();
        let f = Field2D::from_fn(&g, |x, y| (x + 0.3).sin() * (2.0 * y).cos() + 0.1 * (5.0 * x - 3.0 * y).sin());
        let orig = f.physical().into_owned();
        let back = f.to_spectral().to_physical();
        let err = orig.iter().zip(back.physical().iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-14, "round trip error {err}");
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = grid();
        let f = Field2D::from_fn(&g, |x, y| x.sin() + (3.0 * y).cos() * 2.0);
        let phys = f.norm_l2();
        let spec = f.clone().to_spectral().norm_l2();
        assert!((phys - spec).abs() < 1e-12 * phys);
        // ||sin x||^2 + 4 ||cos 3y||^2 = (1 + 4) * (2 pi)^2 / 2
        let expect = (5.0 * (2.0 * PI).powi(2) / 2.0).sqrt();
        assert!((phys - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn mean_and_constant() {
        let g = grid();
        let c = Field2D::constant(&g, 2.5);
        assert!((c.mean() - 2.5).abs() < 1e-15);
        assert!(c.physical().iter().all(|&v| (v - 2.5).abs() < 1e-14));
        assert!(c.remove_mean().is_zero());
    }

    #[test]
    fn lp_norm_of_constant() {
        let g = grid();
        let c = Field2D::constant(&g, 3.0);
        let area = (2.0 * PI).powi(2);
        assert!((c.norm_lp(4.0) - 3.0 * area.powf(0.25)).abs() < 1e-12);
        assert!((c.norm_lp(f64::INFINITY) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = Field2D::zeros(&grid());
        let b = Field2D::zeros(&Grid2D::new(16, 2.0 * PI).unwrap());
        assert!(matches!(a.add(&b), Err(Error::GridMismatch)));
        assert!(VectorField2D::new(a, b).is_err());
    }
}

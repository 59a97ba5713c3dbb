//! Littlewood-Paley blocks on the discrete wavenumber lattice.
//!
//! The radial profile `phi` is a normalized bump supported in `[3/4, 8/3]`:
//! `phi(tau) = psi(tau) / sum_m psi(2^m tau)` where `psi` is a raised-cosine
//! power in `log tau`. The normalization makes `sum_j phi(2^{-j} tau) = 1`
//! exactly for every `tau > 0`, and `chi(tau) = sum_{j<0} phi(2^{-j} tau)`
//! (with `chi(0) = 1`) is the matching low-frequency cutoff.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field2d::{gradient, partial_x, partial_y, random, Field2D, Grid2D};

const PHI_LO: f64 = 0.75;
const PHI_HI: f64 = 8.0 / 3.0;
const CHI_HI: f64 = 4.0 / 3.0;
/// Spectral leakage allowed when checking a support hypothesis.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Shape of the transition bump `psi` in the log-frequency variable
/// `s = ln(tau / (3/4)) / ln(32/9)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionProfile {
    /// `sin^2(pi s)`, continuously differentiable.
    CosineSquared,
    /// `sin^4(pi s)`, three times continuously differentiable.
    #[default]
    CosineFourth,
}

impl TransitionProfile {
    fn psi(self, tau: f64) -> f64 {
        if !(tau > PHI_LO && tau < PHI_HI) {
            return 0.0;
        }
        let s = (tau / PHI_LO).ln() / (PHI_HI / PHI_LO).ln();
        let b = (std::f64::consts::PI * s).sin();
        match self {
            Self::CosineSquared => b * b,
            Self::CosineFourth => (b * b) * (b * b),
        }
    }

    /// Dyadic annulus cutoff, supported in `[3/4, 8/3]`.
    pub fn phi(self, tau: f64) -> f64 {
        let num = self.psi(tau);
        if num == 0.0 {
            return 0.0;
        }
        // Only the scales 2^m tau that land in (3/4, 8/3) contribute.
        let m0 = (PHI_HI / tau).log2().floor() as i32;
        let mut den = 0.0;
        for m in (m0 - 3)..=(m0 + 1) {
            den += self.psi(tau * 2f64.powi(m));
        }
        num / den
    }

    /// Low-frequency cutoff, equal to 1 on `[0, 3/4]` and supported in `[0, 4/3]`.
    pub fn chi(self, tau: f64) -> f64 {
        if tau <= PHI_LO {
            1.0
        } else if tau >= CHI_HI {
            0.0
        } else {
            // Only j = 0 contributes to sum_{j>=0} phi(2^{-j} tau) here.
            1.0 - self.phi(tau)
        }
    }
}

/// Sampled dyadic blocks `Delta_j`, `j in [j_min, j_max]`, on one grid.
///
/// The boundary blocks close the decomposition on the lattice: `Delta_{j_min}`
/// also carries the low tail `chi(2^{-j_min}|k|)` and `Delta_{j_max}` the high
/// tail, so the blocks sum to the identity on every nonzero mode. The mean
/// mode belongs to no block.
#[derive(Clone, Debug)]
pub struct LPFamily {
    grid: Grid2D,
    j_min: i32,
    j_max: i32,
    profile: TransitionProfile,
    weights: Arc<Vec<Vec<f64>>>,
}

pub fn build_family(grid: &Grid2D, profile: TransitionProfile) -> Result<LPFamily> {
    let j_min = grid.k_min().log2().floor() as i32 - 1;
    let j_max = grid.k_nyquist().log2().ceil() as i32 + 1;
    if j_max - j_min + 1 < 4 {
        return Err(Error::InvalidGrid(format!("only {} dyadic shells fit on {grid:?}", j_max - j_min + 1)));
    }
    let len = grid.spectral_len();
    let mut weights = Vec::with_capacity((j_max - j_min + 1) as usize);
    for j in j_min..=j_max {
        let scale = 2f64.powi(-j);
        let w: Vec<f64> = (0..len)
            .map(|i| {
                if i == 0 {
                    return 0.0;
                }
                let tau = grid.k_mag(i) * scale;
                let mut v = profile.phi(tau);
                if j == j_min {
                    v += profile.chi(tau);
                }
                if j == j_max {
                    // sum_{j' > j_max} phi(2^{-j'} |k|) = 1 - chi(2^{-(j_max+1)} |k|)
                    v += 1.0 - profile.chi(tau / 2.0);
                }
                v
            })
            .collect();
        weights.push(w);
    }
    Ok(LPFamily { grid: grid.clone(), j_min, j_max, profile, weights: Arc::new(weights) })
}

impl LPFamily {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn profile(&self) -> TransitionProfile {
        self.profile
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn phi(&self, tau: f64) -> f64 {
        self.profile.phi(tau)
    }

    pub fn chi(&self, tau: f64) -> f64 {
        self.profile.chi(tau)
    }

    fn check_index(&self, j: i32) -> Result<()> {
        if j < self.j_min || j > self.j_max {
            Err(Error::IndexOutOfRange { j, j_min: self.j_min, j_max: self.j_max })
        } else {
            Ok(())
        }
    }

    /// Multiplier of `Delta_j` per stored mode.
    pub fn shell_weights(&self, j: i32) -> Result<&[f64]> {
        self.check_index(j)?;
        Ok(&self.weights[(j - self.j_min) as usize])
    }

    fn check_field(&self, f: &Field2D) -> Result<()> {
        if f.grid() == &self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// `Delta_j f`.
pub fn delta_j(f: &Field2D, j: i32, fam: &LPFamily) -> Result<Field2D> {
    fam.check_field(f)?;
    let w = fam.shell_weights(j)?;
    Ok(f.multiply_symbol(|i| w[i]))
}

/// `S_j f = F^{-1}(chi(2^{-j}|k|) f^)`; keeps the mean since `chi(0) = 1`.
pub fn s_j(f: &Field2D, j: i32, fam: &LPFamily) -> Result<Field2D> {
    fam.check_field(f)?;
    fam.check_index(j)?;
    let g = fam.grid.clone();
    let scale = 2f64.powi(-j);
    let profile = fam.profile;
    Ok(f.multiply_symbol(|i| profile.chi(g.k_mag(i) * scale)))
}

/// Homogeneous low-pass `sum_{j' < j} Delta_{j'}` with closed boundary blocks;
/// zero for `j <= j_min` and it never carries the mean.
pub fn low_pass(f: &Field2D, j: i32, fam: &LPFamily) -> Result<Field2D> {
    fam.check_field(f)?;
    let len = fam.grid.spectral_len();
    let mut w = vec![0.0; len];
    for jj in fam.j_min..j.min(fam.j_max + 1) {
        for (acc, x) in w.iter_mut().zip(fam.shell_weights(jj)?) {
            *acc += x;
        }
    }
    Ok(f.multiply_symbol(|i| w[i]))
}

/// Per-block `L^p` norms `||Delta_j f||_{L^p}` for `j in [j_min, j_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicSpectrum {
    pub p: f64,
    pub j_min: i32,
    pub norms: Vec<f64>,
}

impl DyadicSpectrum {
    pub fn get(&self, j: i32) -> Option<f64> {
        if j < self.j_min {
            return None;
        }
        self.norms.get((j - self.j_min) as usize).copied()
    }

    pub fn j_max(&self) -> i32 {
        self.j_min + self.norms.len() as i32 - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.norms.iter().enumerate().map(move |(k, &v)| (self.j_min + k as i32, v))
    }
}

/// Block norms of a scalar field. `p = 2` uses Parseval per block, other
/// exponents the physical quadrature.
pub fn block_norms(f: &Field2D, p: f64, fam: &LPFamily) -> Result<DyadicSpectrum> {
    fam.check_field(f)?;
    if !(p >= 1.0) {
        return Err(invalid("p", format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    let c = f.spectral();
    let g = &fam.grid;
    let mut norms = Vec::with_capacity(fam.weights.len());
    for w in fam.weights.iter() {
        if p == 2.0 {
            norms.push(weighted_l2(g, &c, w));
        } else {
            let block = Field2D::from_spectral_unchecked(g, c.iter().zip(w).map(|(z, x)| z * x).collect());
            norms.push(block.norm_lp(p));
        }
    }
    Ok(DyadicSpectrum { p, j_min: fam.j_min, norms })
}

/// Block norms of a vector field, using the pointwise Euclidean magnitude.
pub fn block_norms_vec(v: &crate::field2d::VectorField2D, p: f64, fam: &LPFamily) -> Result<DyadicSpectrum> {
    if p == 2.0 {
        let a = block_norms(&v.x, 2.0, fam)?;
        let b = block_norms(&v.y, 2.0, fam)?;
        let norms = a.norms.iter().zip(&b.norms).map(|(x, y)| x.hypot(*y)).collect();
        return Ok(DyadicSpectrum { p, j_min: fam.j_min, norms });
    }
    fam.check_field(&v.x)?;
    if !(p >= 1.0) {
        return Err(invalid("p", format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    let g = &fam.grid;
    let cx = v.x.spectral();
    let cy = v.y.spectral();
    let mut norms = Vec::with_capacity(fam.weights.len());
    for w in fam.weights.iter() {
        if w.iter().all(|&x| x == 0.0) {
            norms.push(0.0);
            continue;
        }
        let bx = Field2D::from_spectral_unchecked(g, cx.iter().zip(w).map(|(z, x)| z * x).collect());
        let by = Field2D::from_spectral_unchecked(g, cy.iter().zip(w).map(|(z, x)| z * x).collect());
        let block = crate::field2d::VectorField2D { x: bx, y: by };
        norms.push(block.norm_lp(p));
    }
    Ok(DyadicSpectrum { p, j_min: fam.j_min, norms })
}

fn weighted_l2(g: &Grid2D, c: &[rustfft::num_complex::Complex64], w: &[f64]) -> f64 {
    let n = g.n();
    let mut acc = 0.0;
    for (ix, (col, wc)) in c.chunks(n).zip(w.chunks(n)).enumerate() {
        let cw = g.column_weight(ix);
        let mut s = 0.0;
        for (z, x) in col.iter().zip(wc) {
            if *x != 0.0 {
                s += z.norm_sqr() * x * x;
            }
        }
        acc += cw * s;
    }
    acc.sqrt() * g.l()
}

/// Random zero-mean field spectrally supported in the annulus of block `j`.
pub fn random_shell(fam: &LPFamily, j: i32, rng: &mut impl Rng) -> Result<Field2D> {
    let w = fam.shell_weights(j)?.to_vec();
    let g = fam.grid.clone();
    let base = random::random_field(&g, rng, |_| 1.0);
    Ok(base.multiply_symbol(|i| w[i]))
}

/// Support hypothesis for [`bernstein_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralSupport {
    /// `supp f^ in 2^j B`, `B` the ball of radius 4/3.
    Ball,
    /// `supp f^ in 2^j C`, `C` the annulus `3/4 <= |xi| <= 8/3`.
    Ring,
}

fn derivative_magnitude(f: &Field2D, m: u32) -> Result<Field2D> {
    Ok(match m {
        0 => f.map_physical(f64::abs),
        1 => {
            let g = gradient(f);
            let (a, b) = (g.x.physical().into_owned(), g.y.physical().into_owned());
            Field2D::from_physical(f.grid(), a.iter().zip(&b).map(|(x, y)| x.hypot(*y)).collect())?
        }
        2 => {
            let fx = partial_x(f);
            let fy = partial_y(f);
            let (xx, xy, yy) = (partial_x(&fx).physical().into_owned(), partial_y(&fx).physical().into_owned(), partial_y(&fy).physical().into_owned());
            let v = (0..xx.len()).map(|i| (xx[i] * xx[i] + 2.0 * xy[i] * xy[i] + yy[i] * yy[i]).sqrt()).collect();
            Field2D::from_physical(f.grid(), v)?
        }
        _ => return Err(invalid("m", format!("derivative order must be 0, 1 or 2, got {m}"))),
    })
}

/// Bernstein ratios.
///
/// * `Ball`: `||grad^m f||_{p1} / (2^{j(m + 2/p2 - 2/p1)} ||f||_{p2})`.
/// * `Ring`: `||f||_{p1} / (2^{-jm} ||grad^m f||_{p1})` (`p2` unused).
///
/// Both are bounded by constants independent of `j` and `f`.
pub fn bernstein_check(f: &Field2D, j: i32, m: u32, p1: f64, p2: f64, support: SpectralSupport) -> Result<f64> {
    if !(1.0 <= p2 && p2 <= p1) {
        return Err(invalid("p1", format!("need 1 <= p2 <= p1, got p1 = {p1}, p2 = {p2}")));
    }
    let scale = 2f64.powi(j);
    let g = f.grid().clone();
    let leak = match support {
        SpectralSupport::Ball => f.relative_leakage(|i| g.k_mag(i) > CHI_HI * scale * (1.0 + 1e-12)),
        SpectralSupport::Ring => f.relative_leakage(|i| {
            let k = g.k_mag(i);
            k < PHI_LO * scale * (1.0 - 1e-12) || k > PHI_HI * scale * (1.0 + 1e-12)
        }),
    };
    if leak > SUPPORT_TOL {
        return Err(Error::SupportViolation(format!("{support:?} at j = {j}: relative leakage {leak:.3e}")));
    }
    let dm = derivative_magnitude(f, m)?;
    match support {
        SpectralSupport::Ball => {
            let den = scale.powf(m as f64 + 2.0 / p2 - 2.0 / p1) * f.norm_lp(p2);
            if den == 0.0 {
                return Err(Error::Degenerate("zero field".into()));
            }
            Ok(dm.norm_lp(p1) / den)
        }
        SpectralSupport::Ring => {
            let den = scale.powi(-(m as i32)) * dm.norm_lp(p1);
            if den == 0.0 {
                return Err(Error::Degenerate("zero field".into()));
            }
            Ok(f.norm_lp(p1) / den)
        }
    }
}

/// Quadratures entering the annulus estimate
/// `c R1^2/p^2 int |f|^p <= int |grad f|^2 |f|^{p-2} = -1/(p-1) int Lap f |f|^{p-2} f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DanIdentity {
    /// `R1^2 / p^2 * int |f|^p` (the left side with `c = 1`).
    pub lhs_unit: f64,
    pub mid: f64,
    pub rhs: f64,
    /// `mid / lhs_unit`, the constant this sample would need.
    pub c_empirical: f64,
}

pub fn dan_identity_check(f: &Field2D, r1: f64, r2: f64, p: f64) -> Result<DanIdentity> {
    if !(2.0..=8.0).contains(&p) {
        return Err(invalid("p", format!("exponent must lie in [2, 8], got {p}")));
    }
    if !(r1 > 0.0 && r2 > r1) {
        return Err(invalid("r1", format!("need 0 < r1 < r2, got ({r1}, {r2})")));
    }
    if f.remove_mean().is_zero() || f.norm_l2() == 0.0 {
        return Err(Error::Degenerate("empty field".into()));
    }
    let g = f.grid().clone();
    let leak = f.relative_leakage(|i| {
        let k = g.k_mag(i);
        k <= r1 * (1.0 - 1e-12) || k >= r2 * (1.0 + 1e-12)
    });
    if leak > SUPPORT_TOL {
        return Err(Error::SupportViolation(format!("annulus ({r1}, {r2}): relative leakage {leak:.3e}")));
    }
    // Quadrature on a grid fine enough that, for even p, the trapezoid rule
    // integrates the degree-p integrands exactly.
    let band = (r2 * g.l() / (2.0 * std::f64::consts::PI)).ceil() as usize + 1;
    let mut nf = g.n();
    while nf <= 2 * (p.ceil() as usize) * band {
        nf *= 2;
    }
    let fine = Grid2D::new(nf, g.l())?;
    let f = &f.resample(&fine)?;
    let area = fine.cell_area();
    let v = f.physical().into_owned();
    let grad = gradient(f);
    let (gx, gy) = (grad.x.physical().into_owned(), grad.y.physical().into_owned());
    let lap = crate::field2d::laplacian(f).physical().into_owned();
    let (mut int_p, mut mid, mut rhs) = (0.0, 0.0, 0.0);
    for i in 0..v.len() {
        let a = v[i].abs();
        let pow = if p == 2.0 { 1.0 } else { a.powf(p - 2.0) };
        int_p += a.powf(p);
        mid += (gx[i] * gx[i] + gy[i] * gy[i]) * pow;
        rhs += lap[i] * pow * v[i];
    }
    let lhs_unit = r1 * r1 / (p * p) * int_p * area;
    let mid = mid * area;
    let rhs = -rhs * area / (p - 1.0);
    Ok(DanIdentity { lhs_unit, mid, rhs, c_empirical: mid / lhs_unit })
}

//! Initial data in `B^{-sigma}_{2,inf}`.
//!
//! The velocity has continuum spectrum
//! `|u^(xi)| = A |xi|^{sigma-1} e^{-|xi|^2} chi(|xi|/2)` and seeded phases,
//! built as `u = grad^perp psi` so it is divergence free by construction.
//! `|xi|^{sigma-1}` near the origin is what places `u_0` (and `rho_0 u_0`) in
//! `B^{-sigma}_{2,inf}`; the Gaussian roll-off keeps the data smooth.
//!
//! Two phase models share that modulus. [`PhaseModel::Localized`] uses the
//! phase `-k.x_c + sum_m g_m sin(m (arg k - a_m))` over odd `m`, which gives a
//! non-radial field concentrated around a random center `x_c`.
//! [`PhaseModel::Random`] draws independent phases per mode and spreads the
//! field over the whole box.

use std::f64::consts::PI;

use rand::Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::besov::{besov_from_blocks, besov_norm_vec, BesovSpec};
use crate::dyadic::{block_norms_vec, LPFamily};
use crate::error::{invalid, Error, Result};
use crate::field2d::random::rng_from_seed;
use crate::field2d::{leray_project, perp_gradient, Field2D, Grid2D, VectorField2D};
use crate::solver::TrackedNorm;

/// Number of Gaussian bumps in the density perturbation.
const BUMPS: usize = 6;
/// Bump width.
const BUMP_WIDTH: f64 = 2.0;
/// Half-width of the square around the velocity center holding the bumps.
const BUMP_SPREAD: f64 = 8.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseModel {
    #[default]
    Localized,
    Random,
}

/// Odd angular harmonics in the localized phase.
const HARMONICS: [f64; 3] = [1.0, 3.0, 5.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSpec {
    pub sigma: f64,
    pub amplitude: f64,
    /// `max |a_0|`; 0 gives constant density.
    #[serde(default)]
    pub rho_amplitude: f64,
    pub seed: u64,
    #[serde(default)]
    pub phases: PhaseModel,
    #[serde(default)]
    pub p_report: Vec<TrackedNorm>,
}

impl InitialDataSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma <= 2.0) {
            return Err(invalid("sigma", format!("need sigma in (0, 2], got {}", self.sigma)));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(invalid("amplitude", format!("must be >= 0, got {}", self.amplitude)));
        }
        if !(self.rho_amplitude >= 0.0 && self.rho_amplitude < 0.5) {
            return Err(invalid("rho_amplitude", format!("need 0 <= rho_amplitude < 1/2, got {}", self.rho_amplitude)));
        }
        for t in &self.p_report {
            if !(t.p >= 1.0) || !(0.0..=2.0).contains(&t.theta) {
                return Err(invalid("p_report", format!("need p >= 1 and theta in [0, 2], got {t:?}")));
            }
        }
        Ok(())
    }
}

/// Norms of the data entering the decay constant `alpha_{sigma,p}` (with `C = 1`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormBundle {
    pub rho_u0_b0_2_1: f64,
    /// `(p, ||rho_0 u_0||_{B^0_{p,1}})` for every reported `p`.
    pub rho_u0_b0_p_1: Vec<(f64, f64)>,
    pub rho_u0_bm_sigma_2_inf: f64,
    pub u0_b0_2_1: f64,
    /// `(p, alpha_{sigma,p})`.
    pub alpha: Vec<(f64, f64)>,
}

/// `2^{-j sigma} ||Delta_j u_0||_{L^2}` over the resolved low shells.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShellProfile {
    pub shells: Vec<(i32, f64)>,
    /// max / min over the shells (1 for a perfectly flat profile).
    pub spread: f64,
}

#[derive(Clone, Debug)]
pub struct InitialData {
    pub a0: Field2D,
    pub u0: VectorField2D,
    /// `rho_0 u_0` with the product 2/3 truncated.
    pub rho_u0: VectorField2D,
    pub bundle: NormBundle,
    pub profile: ShellProfile,
}

/// Continuum velocity envelope `A |xi|^{sigma-1} e^{-|xi|^2} chi(|xi|/2)`.
pub fn velocity_envelope(spec: &InitialDataSpec, fam: &LPFamily, k: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    spec.amplitude * k.powf(spec.sigma - 1.0) * (-k * k).exp() * fam.chi(k / 2.0)
}

/// Velocity and the center it is concentrated around (for localized phases).
fn velocity(spec: &InitialDataSpec, fam: &LPFamily, rng: &mut impl Rng) -> Result<(VectorField2D, (f64, f64))> {
    let g = fam.grid();
    let l2 = g.l() * g.l();
    let mut c = vec![Complex64::new(0.0, 0.0); g.spectral_len()];
    let center = (g.l() * rng.random::<f64>(), g.l() * rng.random::<f64>());
    let harmonics: Vec<(f64, f64, f64)> =
        HARMONICS.iter().map(|&m| (m, 2.0 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>())).collect();
    for (i, z) in c.iter_mut().enumerate() {
        let theta = match spec.phases {
            PhaseModel::Random => 2.0 * PI * rng.random::<f64>(),
            PhaseModel::Localized => {
                let (ix, iy) = g.mode_of(i);
                let (kx, ky) = (g.kx(ix), g.ky(iy));
                let arg = ky.atan2(kx);
                -(kx * center.0 + ky * center.1) + harmonics.iter().map(|(m, a, p)| a * (m * (arg - p)).sin()).sum::<f64>()
            }
        };
        let k = g.k2_op(i).sqrt();
        if k == 0.0 {
            continue;
        }
        let amp = velocity_envelope(spec, fam, g.k_mag(i)) / (k * l2);
        *z = Complex64::from_polar(amp, theta);
    }
    // On the self-conjugate columns the lower half mirrors the upper half so
    // that the symmetrization keeps the full amplitude.
    let n = g.n();
    for ix in [0, n / 2] {
        for iy in 1..n / 2 {
            c[ix * n + n - iy] = c[ix * n + iy].conj();
        }
    }
    let psi = Field2D::from_spectral(g, c)?;
    Ok((leray_project(&perp_gradient(&psi)).dealias(), center))
}

/// Signed Gaussian bumps, scaled to `max |a_0| = rho_amplitude`. With
/// localized phases they sit near the velocity center; otherwise anywhere.
fn density(spec: &InitialDataSpec, fam: &LPFamily, center: (f64, f64), rng: &mut impl Rng) -> Result<Field2D> {
    let g = fam.grid();
    if spec.rho_amplitude == 0.0 {
        return Ok(Field2D::zeros(g));
    }
    let bumps: Vec<(f64, f64, f64)> = (0..BUMPS)
        .map(|_| {
            let (cx, cy) = match spec.phases {
                PhaseModel::Localized => (
                    center.0 + BUMP_SPREAD * (2.0 * rng.random::<f64>() - 1.0),
                    center.1 + BUMP_SPREAD * (2.0 * rng.random::<f64>() - 1.0),
                ),
                PhaseModel::Random => (g.l() * rng.random::<f64>(), g.l() * rng.random::<f64>()),
            };
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            (cx, cy, s)
        })
        .collect();
    let w2 = BUMP_WIDTH * BUMP_WIDTH;
    let pref = 2.0 * PI * w2 / (g.l() * g.l());
    let mut c = vec![Complex64::new(0.0, 0.0); g.spectral_len()];
    for (i, z) in c.iter_mut().enumerate().skip(1) {
        let (ix, iy) = g.mode_of(i);
        let (kx, ky) = (g.kx(ix), g.ky(iy));
        let k = kx.hypot(ky);
        let env = pref * (-0.5 * k * k * w2).exp() * fam.chi(k / 2.0);
        if env == 0.0 {
            continue;
        }
        let sum: Complex64 = bumps.iter().map(|&(cx, cy, s)| Complex64::from_polar(s, -(kx * cx + ky * cy))).sum();
        *z = sum * env;
    }
    let bump = Field2D::from_spectral(g, c)?.dealias().remove_mean();
    let peak = bump.max_abs();
    if peak == 0.0 {
        return Err(Error::Degenerate("density perturbation vanished".into()));
    }
    Ok(bump.scale(spec.rho_amplitude / peak).to_spectral())
}

/// Generate `(a_0, u_0)` and the associated norms.
pub fn make_initial_data(spec: &InitialDataSpec, fam: &LPFamily) -> Result<InitialData> {
    spec.validate()?;
    let g: &Grid2D = fam.grid();
    if g.l() <= 4.0 * PI {
        return Err(invalid("l", format!("box length {} cannot resolve shells j <= -1 (need l > 4 pi)", g.l())));
    }
    let mut rng = rng_from_seed(spec.seed);
    let (u0, center) = velocity(spec, fam, &mut rng)?;
    let a0 = density(spec, fam, center, &mut rng)?;
    let rho_u0 = if a0.is_zero() { u0.clone() } else { u0.scalar_product(&a0.map_physical(|a| 1.0 / (1.0 + a)))? };

    let b2 = block_norms_vec(&rho_u0, 2.0, fam)?;
    let rho_u0_b0_2_1 = besov_from_blocks(&b2, 0.0, 1.0);
    let rho_u0_bm_sigma_2_inf = besov_from_blocks(&b2, -spec.sigma, f64::INFINITY);
    let u0_b0_2_1 = besov_norm_vec(&u0, BesovSpec::new(0.0, 2.0, 1.0)?, fam)?;
    let mut ps: Vec<f64> = spec.p_report.iter().map(|t| t.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let mut rho_u0_b0_p_1 = Vec::new();
    let mut alpha = Vec::new();
    let growth = (u0_b0_2_1.powi(4)).exp().exp();
    for p in ps {
        let bp = if p == 2.0 { rho_u0_b0_2_1 } else { besov_from_blocks(&block_norms_vec(&rho_u0, p, fam)?, 0.0, 1.0) };
        rho_u0_b0_p_1.push((p, bp));
        alpha.push((p, (rho_u0_b0_2_1 + bp + rho_u0_bm_sigma_2_inf) * growth));
    }
    let bundle = NormBundle { rho_u0_b0_2_1, rho_u0_b0_p_1, rho_u0_bm_sigma_2_inf, u0_b0_2_1, alpha };

    let ub = block_norms_vec(&u0, 2.0, fam)?;
    let shells: Vec<(i32, f64)> = ((fam.j_min() + 2)..=-1)
        .map(|j| (j, 2f64.powf(-(j as f64) * spec.sigma) * ub.get(j).unwrap_or(0.0)))
        .collect();
    let (lo, hi) = shells.iter().fold((f64::INFINITY, 0.0_f64), |(l, h), &(_, v)| (l.min(v), h.max(v)));
    let spread = if hi == 0.0 { 1.0 } else { hi / lo };
    Ok(InitialData { a0, u0, rho_u0, bundle, profile: ShellProfile { shells, spread } })
}

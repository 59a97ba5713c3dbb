//! Energy ledger, smallness indicator and density extrema.

use serde::{Deserialize, Serialize};

use crate::besov::{besov_norm, besov_norm_vec, BesovSpec};
use crate::dyadic::LPFamily;
use crate::error::{Error, Result};
use crate::field2d::{Field2D, VectorField2D};

use super::run::Trajectory;
use super::state::FluidState;

/// `sum_k w |k~|^{2s} |c_k|^2` times the box area: `||grad^s f||^2` for a
/// spectral field.
fn sobolev_energy(f: &Field2D, s: i32) -> f64 {
    let g = f.grid();
    let n = g.n();
    let c = f.spectral();
    let mut acc = 0.0;
    for (ix, col) in c.chunks(n).enumerate() {
        let w = g.column_weight(ix);
        let mut sum = 0.0;
        for (iy, z) in col.iter().enumerate() {
            sum += g.k2_op(g.spectral_index(ix, iy)).powi(s) * z.norm_sqr();
        }
        acc += w * sum;
    }
    acc * g.l() * g.l()
}

/// `||grad u||_{L^2}^2`.
pub fn dissipation_rate(u: &VectorField2D) -> f64 {
    sobolev_energy(&u.x, 1) + sobolev_energy(&u.y, 1)
}

/// `||grad Lap u||_{L^2}^2`, the scale of the trapezoid error in the ledger.
pub fn hyper_dissipation(u: &VectorField2D) -> f64 {
    sobolev_energy(&u.x, 3) + sobolev_energy(&u.y, 3)
}

/// `1/2 int rho |u|^2` by grid quadrature.
pub fn kinetic_energy(s: &FluidState) -> f64 {
    let g = s.grid();
    if s.is_homogeneous() {
        let e = s.u.norm_l2();
        return 0.5 * e * e;
    }
    let a = s.a.physical();
    let ux = s.u.x.physical();
    let uy = s.u.y.physical();
    let sum: f64 = (0..g.physical_len()).map(|i| (ux[i] * ux[i] + uy[i] * uy[i]) / (1.0 + a[i])).sum();
    0.5 * sum * g.cell_area()
}

/// One ledger entry. `budget` is the accumulated per-step tolerance
/// `10 dt^3 max ||grad Lap u||^2`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub t: f64,
    pub kinetic: f64,
    pub dissipation: f64,
    pub total: f64,
    pub budget: f64,
}

impl EnergyRecord {
    pub fn new(t: f64, kinetic: f64, dissipation: f64, budget: f64) -> Self {
        Self { t, kinetic, dissipation, total: kinetic + dissipation, budget }
    }
}

pub fn energy_ledger(traj: &Trajectory) -> &[EnergyRecord] {
    &traj.energy
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LedgerCheck {
    pub monotone: bool,
    /// Largest increase of `E` between consecutive saves beyond the tolerance
    /// (negative when every step is within it).
    pub worst_excess: f64,
}

/// `E` must not increase between saves by more than the accumulated budget
/// plus a `1e-12 E(0)` rounding floor.
pub fn check_ledger(records: &[EnergyRecord]) -> Result<LedgerCheck> {
    let first = records.first().ok_or_else(|| Error::InsufficientSamples("empty energy ledger".into()))?;
    let floor = 1e-12 * first.total;
    let mut worst = f64::NEG_INFINITY;
    for w in records.windows(2) {
        let allowed = (w[1].budget - w[0].budget) + floor;
        worst = worst.max(w[1].total - w[0].total - allowed);
    }
    if records.len() < 2 {
        worst = -floor;
    }
    Ok(LedgerCheck { monotone: worst <= 0.0, worst_excess: worst })
}

/// Smallness quantities with `C = 1`:
/// `||rho_0 - 1||_{B^1_{2,1}} exp(||u_0||_{B^0_{2,1}} exp(||u_0||_{L^2}^4))`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub density_b1_2_1: f64,
    pub velocity_b0_2_1: f64,
    pub velocity_l2: f64,
    pub indicator: f64,
    /// `||a_0||_{B^1_{2,1}}`, the quantity gated by the pressure solver's surrogate.
    pub a_b1_2_1: f64,
    pub a_sup: f64,
}

pub fn check_smallness(ic: &FluidState, fam: &LPFamily) -> Result<SmallnessReport> {
    let b1 = BesovSpec::new(1.0, 2.0, 1.0)?;
    let b0 = BesovSpec::new(0.0, 2.0, 1.0)?;
    let (density_b1_2_1, a_b1_2_1, a_sup) = if ic.is_homogeneous() {
        (0.0, 0.0, 0.0)
    } else {
        let dev = ic.density_deviation().to_spectral();
        (besov_norm(&dev, b1, fam)?, besov_norm(&ic.a, b1, fam)?, ic.a.max_abs())
    };
    let velocity_b0_2_1 = besov_norm_vec(&ic.u, b0, fam)?;
    let velocity_l2 = ic.u.norm_l2();
    let indicator = density_b1_2_1 * (velocity_b0_2_1 * velocity_l2.powi(4).exp()).exp();
    Ok(SmallnessReport { density_b1_2_1, velocity_b0_2_1, velocity_l2, indicator, a_b1_2_1, a_sup })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DensityBounds {
    pub rho_min: f64,
    pub rho_max: f64,
    pub initial_min: f64,
    pub initial_max: f64,
    /// Largest excursion outside the initial range, relative to the initial
    /// oscillation (0 when the initial density is constant and stays so).
    pub relative_drift: f64,
}

pub fn density_bounds(traj: &Trajectory) -> Result<DensityBounds> {
    let first = traj.density.first().ok_or_else(|| Error::InsufficientSamples("empty trajectory".into()))?;
    let (lo, hi) = traj.density.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r.rho_min), h.max(r.rho_max)));
    let osc = first.rho_max - first.rho_min;
    let excursion = (first.rho_min - lo).max(hi - first.rho_max).max(0.0);
    let relative_drift = if osc > 0.0 { excursion / osc } else { excursion };
    Ok(DensityBounds { rho_min: lo, rho_max: hi, initial_min: first.rho_min, initial_max: first.rho_max, relative_drift })
}

//! Integral form of the momentum equation along a computed trajectory:
//!
//! ```text
//! u(t) = e^{t Lap} P(rho_0 u_0) - P(vr u)(t)
//!        - int_0^t e^{(t-s) Lap} Lap P(vr u)(s) ds
//!        - int_0^t e^{(t-s) Lap} P div(rho u (x) u)(s) ds,      vr = rho - 1
//! ```
//!
//! Time integrals use the trapezoidal rule on the retained save times.

use crate::error::{Error, Result};
use crate::field2d::{heat_semigroup, laplacian_vec, leray_project, partial_x, partial_y, Field2D, VectorField2D};
use crate::solver::{FluidState, Trajectory};

/// Minimum number of quadrature nodes on `[0, t]`.
pub const MIN_NODES: usize = 32;

/// `rho - 1` times `u`, 2/3 truncated.
fn deviation_momentum(s: &FluidState) -> Result<Option<VectorField2D>> {
    if s.is_homogeneous() {
        return Ok(None);
    }
    Ok(Some(s.u.scalar_product(&s.density_deviation())?))
}

/// `div(rho u (x) u)`, every product 2/3 truncated.
fn momentum_flux_divergence(s: &FluidState) -> Result<VectorField2D> {
    let g = s.grid().clone();
    let ux = s.u.x.physical();
    let uy = s.u.y.physical();
    let rho: Vec<f64> = if s.is_homogeneous() {
        vec![1.0; g.physical_len()]
    } else {
        s.a.physical().iter().map(|a| 1.0 / (1.0 + a)).collect()
    };
    let tensor = |f: &dyn Fn(usize) -> f64| -> Result<Field2D> {
        let v = (0..g.physical_len()).map(f).collect();
        Ok(Field2D::from_physical(&g, v)?.to_spectral().dealias())
    };
    let xx = tensor(&|i| rho[i] * ux[i] * ux[i])?;
    let xy = tensor(&|i| rho[i] * ux[i] * uy[i])?;
    let yy = tensor(&|i| rho[i] * uy[i] * uy[i])?;
    Ok(VectorField2D { x: partial_x(&xx).add(&partial_y(&xy))?, y: partial_x(&xy).add(&partial_y(&yy))? })
}

/// Retained states on `[0, t]` taking every `stride`-th one, ending at `t`.
fn nodes(traj: &Trajectory, t: f64, stride: usize) -> Result<Vec<&FluidState>> {
    if stride == 0 {
        return Err(crate::error::invalid("stride", "must be at least 1"));
    }
    let all: Vec<&FluidState> = traj.states.iter().filter(|s| s.t <= t).collect();
    match (all.first(), all.last()) {
        (Some(f), Some(l)) if f.t == 0.0 && l.t == t => {}
        _ => {
            return Err(Error::InsufficientSamples(format!("no retained states spanning [0, {t}]")));
        }
    }
    if (all.len() - 1) % stride != 0 {
        return Err(crate::error::invalid("stride", format!("{} intervals not divisible by {stride}", all.len() - 1)));
    }
    let picked: Vec<&FluidState> = all.into_iter().step_by(stride).collect();
    if picked.len() < MIN_NODES {
        return Err(Error::InsufficientSamples(format!(
            "{} quadrature nodes on [0, {t}], need at least {MIN_NODES}",
            picked.len()
        )));
    }
    Ok(picked)
}

fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let m = times.len();
    let mut w = vec![0.0; m];
    for i in 1..m {
        let h = times[i] - times[i - 1];
        w[i - 1] += 0.5 * h;
        w[i] += 0.5 * h;
    }
    w
}

/// `sum_i w_i e^{(t - s_i) Lap} F_i`.
fn heat_quadrature(t: f64, times: &[f64], integrand: &[VectorField2D]) -> Result<VectorField2D> {
    let w = trapezoid_weights(times);
    let mut acc = VectorField2D::zeros(integrand[0].grid());
    for ((s, wi), f) in times.iter().zip(&w).zip(integrand) {
        acc = acc.axpy(*wi, &heat_semigroup(f, t - s)?)?;
    }
    Ok(acc)
}

/// Right-hand side of the integral form at save time `t`, using every
/// `stride`-th retained state as a quadrature node. For linear (heat-only)
/// trajectories this is `e^{t Lap} u_0`.
pub fn duhamel_rhs_with_stride(traj: &Trajectory, t: f64, stride: usize) -> Result<VectorField2D> {
    if t == 0.0 {
        let s0 = state_at(traj, 0.0)?;
        if traj.config.linear {
            return Ok(s0.u.clone());
        }
        let rhs = leray_project(&traj.rho_u0);
        return match deviation_momentum(s0)? {
            Some(d) => rhs.sub(&leray_project(&d)),
            None => Ok(rhs),
        };
    }
    let ns = nodes(traj, t, stride)?;
    let u0 = &ns[0].u;
    if traj.config.linear {
        return heat_semigroup(u0, t);
    }
    let times: Vec<f64> = ns.iter().map(|s| s.t).collect();
    let mut rhs = heat_semigroup(&leray_project(&traj.rho_u0), t)?;

    let dev: Vec<Option<VectorField2D>> = ns.iter().map(|s| deviation_momentum(s)).collect::<Result<_>>()?;
    if dev.iter().any(Option::is_some) {
        let zero = VectorField2D::zeros(&traj.grid);
        let proj: Vec<VectorField2D> = dev.iter().map(|d| leray_project(d.as_ref().unwrap_or(&zero))).collect();
        let lap: Vec<VectorField2D> = proj.iter().map(laplacian_vec).collect();
        rhs = rhs.sub(proj.last().expect("nonempty"))?.sub(&heat_quadrature(t, &times, &lap)?)?;
    }
    let flux: Vec<VectorField2D> =
        ns.iter().map(|s| Ok(leray_project(&momentum_flux_divergence(s)?))).collect::<Result<_>>()?;
    rhs.sub(&heat_quadrature(t, &times, &flux)?)
}

pub fn duhamel_rhs(traj: &Trajectory, t: f64) -> Result<VectorField2D> {
    duhamel_rhs_with_stride(traj, t, 1)
}

fn state_at(traj: &Trajectory, t: f64) -> Result<&FluidState> {
    traj.state_at(t).ok_or_else(|| Error::InsufficientSamples(format!("t = {t} is not a retained save time")))
}

fn relative(u: &VectorField2D, v: &VectorField2D) -> Result<f64> {
    let d = u.sub(v)?.norm_l2();
    let n = u.norm_l2();
    Ok(if n > 0.0 { d / n } else { d })
}

/// `||u(t) - rhs(t)||_{L^2} / ||u(t)||_{L^2}`.
pub fn duhamel_residual_with_stride(traj: &Trajectory, t: f64, stride: usize) -> Result<f64> {
    relative(&state_at(traj, t)?.u, &duhamel_rhs_with_stride(traj, t, stride)?)
}

pub fn duhamel_residual(traj: &Trajectory, t: f64) -> Result<f64> {
    duhamel_residual_with_stride(traj, t, 1)
}

/// `||u(t) - e^{t Lap} u_0|| / ||u(t)||`: the size of everything the linear
/// representation leaves out.
pub fn linear_representation_residual(traj: &Trajectory, t: f64) -> Result<f64> {
    let u0 = &traj.states.first().ok_or_else(|| Error::InsufficientSamples("no retained states".into()))?.u;
    relative(&state_at(traj, t)?.u, &heat_semigroup(u0, t)?)
}

/// Both sides of the integration-by-parts identity
/// `int e^{(t-s)Lap} P d_s(vr u) ds = P(vr u)(t) - e^{t Lap} P(vr_0 u_0) + int e^{(t-s)Lap} Lap P(vr u) ds`,
/// with `d_s` by second-order finite differences of the saved states.
#[derive(Clone, Copy, Debug)]
pub struct IbpIdentity {
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    /// `||lhs - rhs|| / ||rhs||`.
    pub relative_gap: f64,
}

pub fn ibp_identity(traj: &Trajectory, t: f64) -> Result<IbpIdentity> {
    let ns = nodes(traj, t, 1)?;
    let times: Vec<f64> = ns.iter().map(|s| s.t).collect();
    let zero = VectorField2D::zeros(&traj.grid);
    let proj: Vec<VectorField2D> = ns
        .iter()
        .map(|s| Ok(leray_project(&deviation_momentum(s)?.unwrap_or_else(|| zero.clone()))))
        .collect::<Result<_>>()?;
    let m = proj.len();
    let mut deriv = Vec::with_capacity(m);
    for i in 0..m {
        let d = if i == 0 {
            let (h1, h2) = (times[1] - times[0], times[2] - times[1]);
            // one-sided second order
            let c0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
            let c1 = (h1 + h2) / (h1 * h2);
            let c2 = -h1 / (h2 * (h1 + h2));
            proj[0].scale(c0).axpy(c1, &proj[1])?.axpy(c2, &proj[2])?
        } else if i == m - 1 {
            let (h1, h2) = (times[m - 2] - times[m - 3], times[m - 1] - times[m - 2]);
            let c0 = h2 / (h1 * (h1 + h2));
            let c1 = -(h1 + h2) / (h1 * h2);
            let c2 = (2.0 * h2 + h1) / (h2 * (h1 + h2));
            proj[m - 3].scale(c0).axpy(c1, &proj[m - 2])?.axpy(c2, &proj[m - 1])?
        } else {
            let (h1, h2) = (times[i] - times[i - 1], times[i + 1] - times[i]);
            let c0 = -h2 / (h1 * (h1 + h2));
            let c1 = (h2 - h1) / (h1 * h2);
            let c2 = h1 / (h2 * (h1 + h2));
            proj[i - 1].scale(c0).axpy(c1, &proj[i])?.axpy(c2, &proj[i + 1])?
        };
        deriv.push(d);
    }
    let lhs = heat_quadrature(t, &times, &deriv)?;
    let lap: Vec<VectorField2D> = proj.iter().map(laplacian_vec).collect();
    let rhs = proj[m - 1].sub(&heat_semigroup(&proj[0], t)?)?.add(&heat_quadrature(t, &times, &lap)?)?;
    let rhs_norm = rhs.norm_l2();
    let gap = lhs.sub(&rhs)?.norm_l2();
    Ok(IbpIdentity {
        lhs_norm: lhs.norm_l2(),
        rhs_norm,
        relative_gap: if rhs_norm > 0.0 { gap / rhs_norm } else { gap },
    })
}

//! Variable-coefficient pressure solve `div((1 + a) grad P) = div f`.
//!
//! Writing `Q = grad Lap^{-1} div` for the gradient-part projector, the
//! equation for `g = grad P` is `g + Q(a g) = Q f`, solved by the Neumann
//! iteration `g_{k+1} = Q f - M_a(g_k)` from `g_0 = Q f`. In `L^2` the map is
//! a contraction with ratio at most `sup |a|`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field2d::{divergence, gradient_part, Field2D, VectorField2D};

/// Largest `sup |a|` accepted by [`solve_pressure`].
pub const SMALLNESS_LIMIT: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct PressureSolveReport {
    /// `grad P`.
    pub gradient: VectorField2D,
    /// `(1 + a) grad P` with the product 2/3 truncated, as it enters the momentum equation.
    pub weighted_gradient: VectorField2D,
    /// Number of Neumann terms formed, counting `g_0`.
    pub iterations: usize,
    pub contraction_estimates: Vec<f64>,
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    pub sup_a: f64,
}

/// Scalar summary of a [`PressureSolveReport`].
#[derive(Clone, Debug, Serialize)]
pub struct PressureStats {
    pub iterations: usize,
    pub max_contraction: Option<f64>,
    pub final_residual: f64,
    pub sup_a: f64,
}

impl PressureSolveReport {
    pub fn stats(&self) -> PressureStats {
        PressureStats {
            iterations: self.iterations,
            max_contraction: self.contraction_estimates.iter().copied().reduce(f64::max),
            final_residual: self.final_residual,
            sup_a: self.sup_a,
        }
    }
}

/// `M_a(g) = grad Lap^{-1} div(a g)`, product 2/3 truncated.
pub fn apply_ma(a: &Field2D, g: &VectorField2D) -> Result<VectorField2D> {
    if a.is_zero() {
        a.check_grid(&g.x)?;
        return Ok(VectorField2D::zeros(a.grid()));
    }
    Ok(gradient_part(&g.scalar_product(a)?))
}

/// Solve for `grad P` to relative residual `tol` in `||div((1 + a) g - f)||_{L^2}`.
pub fn solve_pressure(a: &Field2D, f: &VectorField2D, tol: f64, max_iter: usize) -> Result<PressureSolveReport> {
    if !(tol > 0.0) {
        return Err(crate::error::invalid("tol", format!("must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(crate::error::invalid("max_iter", "must be at least 1"));
    }
    a.check_grid(&f.x)?;
    let a_phys = a.clone().to_physical();
    let sup_a = a_phys.max_abs();
    if sup_a > SMALLNESS_LIMIT {
        return Err(Error::SmallnessViolated { sup_a, limit: SMALLNESS_LIMIT });
    }
    let grid = a.grid().clone();
    let a_zero = sup_a == 0.0;

    let qf = gradient_part(f);
    let div_f = divergence(f).norm_l2();
    // Rounding floor: the residual cannot resolve below the size of f's
    // divergence-free part times machine precision.
    let floor = 64.0 * f64::EPSILON * grid.k_nyquist() * f.norm_l2();
    let target = (tol * div_f).max(floor);

    let weight = |g: &VectorField2D| -> Result<VectorField2D> {
        if a_zero {
            Ok(VectorField2D::zeros(&grid))
        } else {
            g.scalar_product(&a_phys)
        }
    };
    let residual = |g: &VectorField2D, ag: &VectorField2D| -> Result<f64> {
        Ok(divergence(&g.add(ag)?.sub(f)?).norm_l2())
    };

    let mut g = qf.clone();
    let mut ag = weight(&g)?;
    let mut r = residual(&g, &ag)?;
    let mut history = vec![r];
    let mut ratios = Vec::new();
    let mut prev_step: Option<f64> = None;
    let mut iterations = 1;
    while r > target {
        if iterations >= max_iter {
            return Err(Error::PressureNotConverged { iterations, residual: r / div_f.max(f64::MIN_POSITIVE) });
        }
        let next = qf.sub(&gradient_part(&ag))?;
        let step = next.sub(&g)?.norm_l2();
        if let Some(p) = prev_step {
            if p > 0.0 {
                ratios.push(step / p);
            }
        }
        prev_step = Some(step);
        g = next;
        ag = weight(&g)?;
        r = residual(&g, &ag)?;
        history.push(r);
        iterations += 1;
    }
    let weighted_gradient = g.add(&ag)?;
    let final_residual = if div_f > 0.0 { r / div_f } else { r };
    Ok(PressureSolveReport {
        gradient: g,
        weighted_gradient,
        iterations,
        contraction_estimates: ratios,
        residual_history: history,
        final_residual,
        sup_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field2d::random::{random_solenoidal, random_vector, rng_from_seed};
    use crate::field2d::{curl, Grid2D};
    use std::f64::consts::PI;

    fn grid() -> Grid2D {
        Grid2D::new(32, 2.0 * PI).unwrap()
    }

    #[test]
    fn zero_density_one_iteration() {
        let g = grid();
        let f = random_vector(&g, &mut rng_from_seed(1), 10);
        let rep = solve_pressure(&Field2D::zeros(&g), &f, 1e-10, 50).unwrap();
        assert_eq!(rep.iterations, 1);
        let diff = rep.gradient.sub(&gradient_part(&f)).unwrap().norm_l2();
        assert_eq!(diff, 0.0);
    }

    #[test]
    fn cosine_density_converges() {
        let g = grid();
        let a = Field2D::from_fn(&g, |x, _| 0.1 * x.cos());
        let f = random_vector(&g, &mut rng_from_seed(2), 10);
        let rep = solve_pressure(&a, &f, 1e-10, 25).unwrap();
        assert!(rep.final_residual <= 1e-10);
        assert!(rep.contraction_estimates.iter().all(|&q| q <= 0.12), "{:?}", rep.contraction_estimates);
        assert!(curl(&rep.gradient).norm_l2() <= 1e-10 * rep.gradient.norm_l2());
    }

    #[test]
    fn solenoidal_source_gives_zero() {
        let g = grid();
        let a = Field2D::from_fn(&g, |x, y| 0.2 * (x + y).sin());
        let f = random_solenoidal(&g, &mut rng_from_seed(3), 10);
        let rep = solve_pressure(&a, &f, 1e-10, 25).unwrap();
        assert!(rep.gradient.norm_l2() <= 1e-12 * f.norm_l2());
    }

    #[test]
    fn large_density_rejected() {
        let g = grid();
        let a = Field2D::from_fn(&g, |x, _| 0.9 * x.cos());
        let f = random_vector(&g, &mut rng_from_seed(4), 10);
        assert!(matches!(solve_pressure(&a, &f, 1e-10, 25), Err(Error::SmallnessViolated { .. })));
    }

    #[test]
    fn constant_density_commutes() {
        let g = grid();
        let f = random_vector(&g, &mut rng_from_seed(5), 10);
        let m = apply_ma(&Field2D::constant(&g, 0.3), &f).unwrap();
        let expect = gradient_part(&f.dealias()).scale(0.3);
        assert!(m.sub(&expect).unwrap().norm_l2() <= 1e-13 * expect.norm_l2());
    }
}

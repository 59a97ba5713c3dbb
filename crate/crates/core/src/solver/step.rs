//! One time step of
//!
//! ```text
//! u_t - Lap u = a Lap u - u . grad u - (1 + a) grad P,    div u = 0
//! a_t + u . grad a = 0
//! ```
//!
//! by a Lawson (integrating factor) third-order Runge-Kutta scheme on Kutta's
//! nodes `0, 1/2, 1`: the viscous term is integrated exactly per mode and all
//! other terms explicitly.

use crate::error::{Error, Result};
use crate::field2d::{leray_project, partial_x, partial_y, laplacian, Field2D, Grid2D, VectorField2D};
use crate::pressure::{solve_pressure, PressureStats};

use super::config::SolverConfig;
use super::state::FluidState;

/// Right-hand side evaluated at one stage.
pub struct Tendency {
    pub a: Option<Field2D>,
    pub u: VectorField2D,
    pub grad_p: VectorField2D,
    pub pressure: Option<PressureStats>,
}

/// Explicit part of the right-hand side at `(a, u)`.
pub fn tendency(a: &Field2D, u: &VectorField2D, cfg: &SolverConfig) -> Result<Tendency> {
    let grid = u.grid().clone();
    if cfg.linear || u.is_zero() {
        return Ok(Tendency { a: None, u: VectorField2D::zeros(&grid), grad_p: VectorField2D::zeros(&grid), pressure: None });
    }
    let homogeneous = a.is_zero();
    let ux = u.x.physical();
    let uy = u.y.physical();
    let d = [partial_x(&u.x), partial_y(&u.x), partial_x(&u.y), partial_y(&u.y)].map(Field2D::into_physical_vec);

    let len = grid.physical_len();
    let mut fx = vec![0.0; len];
    let mut fy = vec![0.0; len];
    for i in 0..len {
        fx[i] = -(ux[i] * d[0][i] + uy[i] * d[1][i]);
        fy[i] = -(ux[i] * d[2][i] + uy[i] * d[3][i]);
    }

    let mut a_phys = None;
    let mut na = None;
    if !homogeneous {
        let ap = a.clone().to_physical();
        let lx = laplacian(&u.x).into_physical_vec();
        let ly = laplacian(&u.y).into_physical_vec();
        let av = ap.physical();
        for i in 0..len {
            fx[i] += av[i] * lx[i];
            fy[i] += av[i] * ly[i];
        }
        let ax = partial_x(a).into_physical_vec();
        let ay = partial_y(a).into_physical_vec();
        let adv: Vec<f64> = (0..len).map(|i| -(ux[i] * ax[i] + uy[i] * ay[i])).collect();
        na = Some(Field2D::from_physical(&grid, adv)?.to_spectral().dealias());
        drop(av);
        a_phys = Some(ap);
    }

    let f = VectorField2D {
        x: Field2D::from_physical(&grid, fx)?.to_spectral().dealias(),
        y: Field2D::from_physical(&grid, fy)?.to_spectral().dealias(),
    };
    match a_phys {
        None => {
            let nu = leray_project(&f);
            let grad_p = f.sub(&nu)?;
            Ok(Tendency { a: na, u: nu, grad_p, pressure: None })
        }
        Some(ap) => {
            let rep = solve_pressure(&ap, &f, cfg.pressure_tol, cfg.pressure_max_iter)?;
            let nu = f.sub(&rep.weighted_gradient)?;
            let stats = rep.stats();
            Ok(Tendency { a: na, u: nu, grad_p: rep.gradient, pressure: Some(stats) })
        }
    }
}

/// Reusable stepper; caches the integrating-factor multipliers for the
/// last step size used.
pub struct Stepper {
    cfg: SolverConfig,
    cached_h: f64,
    e_half: Vec<f64>,
    e_full: Vec<f64>,
    filter: Option<Vec<f64>>,
    grid: Grid2D,
    /// Largest pressure iteration count seen.
    pub max_pressure_iterations: usize,
    /// Largest observed pressure contraction ratio.
    pub max_contraction: f64,
}

impl Stepper {
    pub fn new(grid: &Grid2D, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let filter = (cfg.density_filter_strength > 0.0).then(|| {
            let kc = grid.k_nyquist() * 2.0 / 3.0;
            (0..grid.spectral_len())
                .map(|i| (-cfg.density_filter_strength * (grid.k_mag(i) / kc).powi(16)).exp())
                .collect()
        });
        Ok(Self {
            cfg: cfg.clone(),
            cached_h: f64::NAN,
            e_half: Vec::new(),
            e_full: Vec::new(),
            filter,
            grid: grid.clone(),
            max_pressure_iterations: 0,
            max_contraction: 0.0,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn factors(&mut self, h: f64) {
        if self.cached_h == h {
            return;
        }
        let g = &self.grid;
        self.e_half = (0..g.spectral_len()).map(|i| (-0.5 * h * g.k2_op(i)).exp()).collect();
        self.e_full = self.e_half.iter().map(|e| e * e).collect();
        self.cached_h = h;
    }

    fn note(&mut self, t: &Tendency) {
        if let Some(p) = &t.pressure {
            self.max_pressure_iterations = self.max_pressure_iterations.max(p.iterations);
            if let Some(c) = p.max_contraction {
                self.max_contraction = self.max_contraction.max(c);
            }
        }
    }

    /// Advance `state` by `h`.
    pub fn step(&mut self, state: &FluidState, h: f64) -> Result<FluidState> {
        if !(h > 0.0) {
            return Err(crate::error::invalid("h", format!("step must be positive, got {h}")));
        }
        self.factors(h);
        let eh = |v: &VectorField2D, w: &[f64]| -> Result<VectorField2D> { v.try_map(|c| c.multiply_weights(w)) };
        let (e1, e2) = (self.e_half.clone(), self.e_full.clone());
        let u0 = &state.u;

        if self.cfg.linear {
            let u = eh(u0, &e2)?;
            return Ok(FluidState { t: state.t + h, a: state.a.clone(), u, grad_p: VectorField2D::zeros(&self.grid) });
        }

        let k1 = tendency(&state.a, u0, &self.cfg)?;
        self.note(&k1);
        let u2 = eh(&u0.axpy(0.5 * h, &k1.u)?, &e1)?;
        let a2 = axpy_opt(&state.a, 0.5 * h, k1.a.as_ref())?;

        let k2 = tendency(&a2, &u2, &self.cfg)?;
        self.note(&k2);
        let e1k2 = eh(&k2.u, &e1)?;
        let u3 = eh(&u0.axpy(-h, &k1.u)?, &e2)?.axpy(2.0 * h, &e1k2)?;
        let a3 = axpy_opt(&axpy_opt(&state.a, -h, k1.a.as_ref())?, 2.0 * h, k2.a.as_ref())?;

        let k3 = tendency(&a3, &u3, &self.cfg)?;
        self.note(&k3);
        let incr = eh(&k1.u, &e2)?.axpy(4.0, &e1k2)?.add(&k3.u)?;
        let u = leray_project(&eh(u0, &e2)?.axpy(h / 6.0, &incr)?);

        let mut a = state.a.clone();
        if let (Some(n1), Some(n2), Some(n3)) = (&k1.a, &k2.a, &k3.a) {
            a = a.axpy(h / 6.0, &n1.axpy(4.0, n2)?.add(n3)?)?;
            if let Some(w) = &self.filter {
                a = a.multiply_weights(w)?;
            }
        }
        let t = state.t + h;
        let next = FluidState { t, a, u, grad_p: k3.grad_p };
        if !next.is_homogeneous() {
            let m = next.min_one_plus_a();
            if !(m > 0.0) {
                return Err(Error::DensityPositivityLost { t, min_one_plus_a: m });
            }
        }
        Ok(next)
    }
}

fn axpy_opt(a: &Field2D, s: f64, x: Option<&Field2D>) -> Result<Field2D> {
    match x {
        Some(x) => a.axpy(s, x),
        None => Ok(a.clone()),
    }
}

/// Single step with a fresh [`Stepper`].
pub fn step(state: &FluidState, cfg: &SolverConfig) -> Result<FluidState> {
    Stepper::new(state.grid(), cfg)?.step(state, cfg.dt)
}

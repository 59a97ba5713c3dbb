//! The velocity solver against an independent vorticity-form solver built on
//! complex FFTs, and its self-convergence order.

use std::f64::consts::PI;

use nsdecay_core::field2d::random::{random_band_limited, random_solenoidal, rng_from_seed};
use nsdecay_core::solver::Stepper;
use nsdecay_core::{FluidState, Grid2D, SolverConfig, VectorField2D};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Periodic vorticity solver: `w_t + u.grad w = Lap w`, integrating-factor RK4,
/// 2/3 truncation. Physical arrays are row-major with `y` as the row index.
struct Vorticity {
    n: usize,
    kx: Vec<f64>,
    ky: Vec<f64>,
    keep: Vec<bool>,
    fwd: std::sync::Arc<dyn Fft<f64>>,
    inv: std::sync::Arc<dyn Fft<f64>>,
}

impl Vorticity {
    fn new(n: usize, l: f64) -> Self {
        let wave = |i: usize| {
            let s = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
            if i == n / 2 { 0.0 } else { 2.0 * PI * s / l }
        };
        let lattice = |i: usize| if i <= n / 2 { i as i64 } else { i as i64 - n as i64 };
        let mut keep = vec![false; n * n];
        for r in 0..n {
            for c in 0..n {
                keep[r * n + c] = lattice(r).abs() <= (n / 3) as i64 && lattice(c).abs() <= (n / 3) as i64;
            }
        }
        let mut planner = FftPlanner::new();
        Self {
            n,
            kx: (0..n).map(wave).collect(),
            ky: (0..n).map(wave).collect(),
            keep,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    fn fft2(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        for row in data.chunks_mut(n) {
            plan.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = data[r * n + c];
            }
            plan.process(&mut col);
            for r in 0..n {
                data[r * n + c] = col[r];
            }
        }
        if inverse {
            let s = 1.0 / (n * n) as f64;
            data.iter_mut().for_each(|z| *z *= s);
        }
    }

    fn to_hat(&self, v: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft2(&mut d, false);
        d
    }

    fn to_phys(&self, h: &[Complex64]) -> Vec<f64> {
        let mut d = h.to_vec();
        self.fft2(&mut d, true);
        d.iter().map(|z| z.re).collect()
    }

    fn k2(&self, i: usize) -> f64 {
        let (r, c) = (i / self.n, i % self.n);
        self.kx[c] * self.kx[c] + self.ky[r] * self.ky[r]
    }

    fn velocity_hat(&self, w: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let mut ux = vec![Complex64::new(0.0, 0.0); n * n];
        let mut uy = ux.clone();
        for i in 0..n * n {
            let k2 = self.k2(i);
            if k2 == 0.0 {
                continue;
            }
            let (r, c) = (i / n, i % n);
            // u = (-d_y psi, d_x psi), Lap psi = w
            let psi = -w[i] / k2;
            ux[i] = -Complex64::new(0.0, self.ky[r]) * psi;
            uy[i] = Complex64::new(0.0, self.kx[c]) * psi;
        }
        (ux, uy)
    }

    fn rhs(&self, w: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let (ux, uy) = self.velocity_hat(w);
        let dwx: Vec<Complex64> = (0..n * n).map(|i| Complex64::new(0.0, self.kx[i % n]) * w[i]).collect();
        let dwy: Vec<Complex64> = (0..n * n).map(|i| Complex64::new(0.0, self.ky[i / n]) * w[i]).collect();
        let (ux, uy, dwx, dwy) = (self.to_phys(&ux), self.to_phys(&uy), self.to_phys(&dwx), self.to_phys(&dwy));
        let adv: Vec<f64> = (0..n * n).map(|i| -(ux[i] * dwx[i] + uy[i] * dwy[i])).collect();
        let mut h = self.to_hat(&adv);
        for (i, z) in h.iter_mut().enumerate() {
            if !self.keep[i] {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        h
    }

    fn step(&self, w: &[Complex64], h: f64) -> Vec<Complex64> {
        let n2 = self.n * self.n;
        let e = |tau: f64, i: usize| (-tau * self.k2(i)).exp();
        let k1 = self.rhs(w);
        let a: Vec<Complex64> = (0..n2).map(|i| e(h / 2.0, i) * (w[i] + 0.5 * h * k1[i])).collect();
        let k2 = self.rhs(&a);
        let b: Vec<Complex64> = (0..n2).map(|i| e(h / 2.0, i) * w[i] + 0.5 * h * k2[i]).collect();
        let k3 = self.rhs(&b);
        let c: Vec<Complex64> = (0..n2).map(|i| e(h, i) * w[i] + h * e(h / 2.0, i) * k3[i]).collect();
        let k4 = self.rhs(&c);
        (0..n2)
            .map(|i| {
                e(h, i) * w[i] + h / 6.0 * (e(h, i) * k1[i] + 2.0 * e(h / 2.0, i) * (k2[i] + k3[i]) + k4[i])
            })
            .collect()
    }
}

fn initial(g: &Grid2D, seed: u64, amp: f64) -> VectorField2D {
    let mut rng = rng_from_seed(seed);
    let u = random_solenoidal(g, &mut rng, 6);
    u.scale(amp / u.max_abs()).dealias()
}

#[test]
fn homogeneous_solver_matches_vorticity_oracle() {
    let (n, l) = (32, 2.0 * PI);
    let g = Grid2D::new(n, l).unwrap();
    let u0 = initial(&g, 5, 1.0);

    let o = Vorticity::new(n, l);
    let (ux, uy) = (u0.x.physical().into_owned(), u0.y.physical().into_owned());
    let (hx, hy) = (o.to_hat(&ux), o.to_hat(&uy));
    let mut w: Vec<Complex64> =
        (0..n * n).map(|i| Complex64::new(0.0, o.kx[i % n]) * hy[i] - Complex64::new(0.0, o.ky[i / n]) * hx[i]).collect();
    let h = 1e-3;
    for _ in 0..1000 {
        w = o.step(&w, h);
    }
    let (vx, vy) = o.velocity_hat(&w);
    let (vx, vy) = (o.to_phys(&vx), o.to_phys(&vy));

    let cfg = SolverConfig::new(h, 1.0);
    let mut stepper = Stepper::new(&g, &cfg).unwrap();
    let mut st = FluidState::homogeneous(u0);
    for _ in 0..1000 {
        st = stepper.step(&st, h).unwrap();
    }
    let (sx, sy) = (st.u.x.physical().into_owned(), st.u.y.physical().into_owned());
    let diff: f64 = (0..n * n).map(|i| (sx[i] - vx[i]).powi(2) + (sy[i] - vy[i]).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = (0..n * n).map(|i| vx[i].powi(2) + vy[i].powi(2)).sum::<f64>().sqrt();
    assert!(norm > 0.1, "solution decayed away: {norm}");
    assert!(diff / norm < 1e-6, "relative difference {:.3e}", diff / norm);
}

fn run_to(ic: &FluidState, g: &Grid2D, dt: f64, t_end: f64) -> FluidState {
    let cfg = SolverConfig::new(dt, t_end);
    let mut stepper = Stepper::new(g, &cfg).unwrap();
    let mut st = ic.clone();
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        st = stepper.step(&st, dt).unwrap();
    }
    st
}

#[test]
fn inhomogeneous_self_convergence_is_third_order() {
    let g = Grid2D::new(32, 4.0 * PI).unwrap();
    let mut rng = rng_from_seed(9);
    let a = random_band_limited(&g, &mut rng, 5);
    let a = a.scale(0.1 / a.max_abs()).dealias();
    let ic = FluidState::new(a, initial(&g, 10, 1.0)).unwrap();
    let dts = [0.05, 0.025, 0.0125];
    let sols: Vec<FluidState> = dts.iter().map(|&dt| run_to(&ic, &g, dt, 1.0)).collect();
    let e1 = sols[0].u.sub(&sols[1].u).unwrap().norm_l2();
    let e2 = sols[1].u.sub(&sols[2].u).unwrap().norm_l2();
    let ratio = e1 / e2;
    assert!((6.0..=10.0).contains(&ratio), "refinement ratio {ratio} (expected about 8)");
    let d1 = sols[0].a.sub(&sols[1].a).unwrap().norm_l2();
    let d2 = sols[1].a.sub(&sols[2].a).unwrap().norm_l2();
    assert!((6.0..=10.0).contains(&(d1 / d2)), "density refinement ratio {}", d1 / d2);
}

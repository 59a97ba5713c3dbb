//! Homogeneous Besov, Chemin-Lerner and time-weighted norms.
//!
//! All sums run over the closed block range `[j_min, j_max]` of an
//! [`LPFamily`]; the mean mode belongs to no block and is therefore excluded.
//! Time integrals use the trapezoidal rule on the sample times.

use serde::{Deserialize, Serialize};

use crate::dyadic::{block_norms, block_norms_vec, DyadicSpectrum, LPFamily};
use crate::error::{invalid, Error, Result};
use crate::field2d::{Field2D, VectorField2D};

/// Indices `(s, p, r)` of `B^s_{p,r}`; `p` and `r` may be `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(invalid("s", format!("regularity must be finite, got {s}")));
        }
        if !(p >= 1.0) {
            return Err(invalid("p", format!("need p in [1, inf], got {p}")));
        }
        if !(r >= 1.0) {
            return Err(invalid("r", format!("need r in [1, inf], got {r}")));
        }
        Ok(Self { s, p, r })
    }
}

/// `l^r` norm of a finite sequence.
pub fn lr_norm(values: impl IntoIterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.into_iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    } else if r == 1.0 {
        values.into_iter().map(f64::abs).sum()
    } else {
        values.into_iter().map(|x| x.abs().powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `||(2^{js} a_j)_j||_{l^r}` for precomputed block norms `a_j`.
pub fn besov_from_blocks(blocks: &DyadicSpectrum, s: f64, r: f64) -> f64 {
    lr_norm(blocks.iter().map(|(j, a)| 2f64.powf(j as f64 * s) * a), r)
}

pub fn besov_norm(f: &Field2D, spec: BesovSpec, fam: &LPFamily) -> Result<f64> {
    let blocks = block_norms(f, spec.p, fam)?;
    Ok(besov_from_blocks(&blocks, spec.s, spec.r))
}

pub fn besov_norm_vec(v: &VectorField2D, spec: BesovSpec, fam: &LPFamily) -> Result<f64> {
    let blocks = block_norms_vec(v, spec.p, fam)?;
    Ok(besov_from_blocks(&blocks, spec.s, spec.r))
}

/// Block norms sampled along a trajectory.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct NormTrajectory {
    samples: Vec<(f64, DyadicSpectrum)>,
}

impl NormTrajectory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a sample; times must increase and every spectrum must share
    /// one block range and one Lebesgue exponent.
    pub fn push(&mut self, t: f64, spectrum: DyadicSpectrum) -> Result<()> {
        if let Some((last_t, first)) = self.samples.last().map(|(t, _)| *t).zip(self.samples.first().map(|(_, s)| s)) {
            if !(t > last_t) {
                return Err(invalid("t", format!("sample times must increase: {t} after {last_t}")));
            }
            if first.p != spectrum.p || first.j_min != spectrum.j_min || first.norms.len() != spectrum.norms.len() {
                return Err(invalid("spectrum", "all samples must share one family and one p"));
            }
        }
        self.samples.push((t, spectrum));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(t, _)| *t)
    }

    pub fn samples(&self) -> &[(f64, DyadicSpectrum)] {
        &self.samples
    }

    pub fn p(&self) -> Option<f64> {
        self.samples.first().map(|(_, s)| s.p)
    }

    fn check_spec(&self, spec: BesovSpec) -> Result<()> {
        match self.p() {
            None => Err(Error::InsufficientSamples("empty trajectory".into())),
            Some(p) if p != spec.p => Err(invalid("p", format!("trajectory holds L^{p} blocks, spec asks for L^{}", spec.p))),
            _ => Ok(()),
        }
    }
}

/// Per-block time norms `(int w(t) a_j(t)^q dt)^{1/q}` by the trapezoidal
/// rule, or `sup_t a_j(t)` for `q = inf` (weights then act as an indicator).
fn block_time_norms(traj: &NormTrajectory, q: f64, weights: Option<&[f64]>) -> Result<Vec<(i32, f64)>> {
    let samples = traj.samples();
    let first = &samples[0].1;
    if q.is_infinite() {
        return Ok(first
            .iter()
            .map(|(j, _)| {
                let k = (j - first.j_min) as usize;
                let sup = samples
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| weights.map_or(true, |w| w[*i] > 0.0))
                    .map(|(_, (_, s))| s.norms[k])
                    .fold(0.0_f64, f64::max);
                (j, sup)
            })
            .collect());
    }
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples(format!("time integral needs >= 2 samples, got {}", samples.len())));
    }
    Ok(first
        .iter()
        .map(|(j, _)| {
            let k = (j - first.j_min) as usize;
            let integrand = |i: usize| samples[i].1.norms[k].powf(q) * weights.map_or(1.0, |w| w[i]);
            let mut acc = 0.0;
            for i in 1..samples.len() {
                let dt = samples[i].0 - samples[i - 1].0;
                acc += 0.5 * dt * (integrand(i - 1) + integrand(i));
            }
            (j, acc.powf(1.0 / q))
        })
        .collect())
}

/// Chemin-Lerner norm `||(2^{js} ||Delta_j a||_{L^q_T(L^p)})_j||_{l^r}`.
pub fn chemin_lerner_norm(traj: &NormTrajectory, q: f64, spec: BesovSpec) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(invalid("q", format!("need q in [1, inf], got {q}")));
    }
    traj.check_spec(spec)?;
    let blocks = block_time_norms(traj, q, None)?;
    Ok(lr_norm(blocks.into_iter().map(|(j, a)| 2f64.powf(j as f64 * spec.s) * a), spec.r))
}

/// Time-weighted norm `||(2^{js} (int_0^T ||Delta_j a||^q_{L^p} f dt)^{1/q})_j||_{l^r}`
/// with the weight `f` sampled at the trajectory times.
pub fn time_weighted_norm(traj: &NormTrajectory, weights: &[f64], q: f64, spec: BesovSpec) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(invalid("q", format!("need q in [1, inf], got {q}")));
    }
    traj.check_spec(spec)?;
    if weights.len() != traj.len() {
        return Err(invalid("weights", format!("{} weights for {} samples", weights.len(), traj.len())));
    }
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
        return Err(invalid("weights", format!("weight {w} at sample {i} is negative")));
    }
    let blocks = block_time_norms(traj, q, Some(weights))?;
    Ok(lr_norm(blocks.into_iter().map(|(j, a)| 2f64.powf(j as f64 * spec.s) * a), spec.r))
}

/// Sides of `||f||_{B^theta_{p,1}} <= ||f||_{B^0_{p,1}}^{1-theta/2} ||f||_{B^2_{p,1}}^{theta/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interpolation {
    pub lhs: f64,
    pub rhs: f64,
}

impl Interpolation {
    /// `lhs <= rhs` up to rounding.
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

pub fn interpolation_check(f: &Field2D, theta: f64, p: f64, fam: &LPFamily) -> Result<Interpolation> {
    if !(0.0..=2.0).contains(&theta) {
        return Err(invalid("theta", format!("need theta in [0, 2], got {theta}")));
    }
    let blocks = block_norms(f, p, fam)?;
    let lhs = besov_from_blocks(&blocks, theta, 1.0);
    let b0 = besov_from_blocks(&blocks, 0.0, 1.0);
    let b2 = besov_from_blocks(&blocks, 2.0, 1.0);
    if !(lhs.is_finite() && b0.is_finite() && b2.is_finite()) {
        return Err(Error::Degenerate("non-finite Besov norm".into()));
    }
    Ok(Interpolation { lhs, rhs: b0.powf(1.0 - theta / 2.0) * b2.powf(theta / 2.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{build_family, TransitionProfile};
    use crate::field2d::Grid2D;
    use std::f64::consts::PI;

    fn setup() -> (Grid2D, LPFamily) {
        let g = Grid2D::new(32, 2.0 * PI).unwrap();
        let fam = build_family(&g, TransitionProfile::default()).unwrap();
        (g, fam)
    }

    #[test]
    fn spec_validation() {
        assert!(BesovSpec::new(0.0, 0.5, 1.0).is_err());
        assert!(BesovSpec::new(f64::NAN, 2.0, 1.0).is_err());
        assert!(BesovSpec::new(1.0, f64::INFINITY, f64::INFINITY).is_ok());
    }

    #[test]
    fn unit_mode_b0_21_is_l2() {
        let (g, fam) = setup();
        let f = Field2D::from_fn(&g, |x, _| x.cos());
        let b = besov_norm(&f, BesovSpec::new(0.0, 2.0, 1.0).unwrap(), &fam).unwrap();
        assert!((b - f.norm_l2()).abs() < 1e-12 * b);
    }

    #[test]
    fn homogeneity() {
        let (g, fam) = setup();
        let f = Field2D::from_fn(&g, |x, y| (x + y).sin() + (3.0 * x).cos());
        let spec = BesovSpec::new(0.5, 3.0, 2.0).unwrap();
        let a = besov_norm(&f, spec, &fam).unwrap();
        let b = besov_norm(&f.scale(5.0), spec, &fam).unwrap();
        assert!((b - 5.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn interpolation_endpoints_are_equalities() {
        let (g, fam) = setup();
        let f = Field2D::from_fn(&g, |x, y| (2.0 * x + y).sin() + (5.0 * y).cos());
        for theta in [0.0, 2.0] {
            let r = interpolation_check(&f, theta, 2.0, &fam).unwrap();
            assert!((r.lhs - r.rhs).abs() < 1e-12 * r.lhs);
        }
    }

    #[test]
    fn trajectory_rejects_unsorted_and_short() {
        let (g, fam) = setup();
        let f = Field2D::from_fn(&g, |x, _| x.sin());
        let s = block_norms(&f, 2.0, &fam).unwrap();
        let mut traj = NormTrajectory::new();
        traj.push(1.0, s.clone()).unwrap();
        assert!(traj.push(0.5, s.clone()).is_err());
        let spec = BesovSpec::new(0.0, 2.0, 1.0).unwrap();
        assert!(chemin_lerner_norm(&traj, 1.0, spec).is_err());
        assert!(chemin_lerner_norm(&traj, f64::INFINITY, spec).is_ok());
        assert!(time_weighted_norm(&traj, &[-1.0], f64::INFINITY, spec).is_err());
    }
}

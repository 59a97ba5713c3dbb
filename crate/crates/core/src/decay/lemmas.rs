//! Sampled checkers for two decay lemmas. Each verifies the hypotheses and the
//! conclusion on the sample mesh; a lemma is violated only if the hypotheses
//! hold and the conclusion fails.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub hypotheses_hold: bool,
    pub conclusion_holds: bool,
    /// First failed check, if any.
    pub failure: Option<String>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.hypotheses_hold && self.conclusion_holds
    }
}

const SLACK: f64 = 1e-12;

fn le(a: f64, b: f64) -> bool {
    a <= b + SLACK * b.abs().max(1.0)
}

fn check_sorted(samples: &[(f64, f64)]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples("no samples".into()));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(invalid("samples", format!("times must increase strictly: {} then {}", w[0].0, w[1].0)));
        }
    }
    Ok(())
}

fn first_fail(checks: impl IntoIterator<Item = (bool, String)>) -> Option<String> {
    checks.into_iter().find(|(ok, _)| !ok).map(|(_, m)| m)
}

/// Hypotheses: `0 <= f <= C0`; `||f||_{L^q(0,t)} <= C1` at every sample time
/// (trapezoidal rule from the first sample); `f(t) <= C2 f(tau) + C1 C2 tau^{-1/q}`
/// for all sampled `t >= tau > 0`. Conclusion:
/// `f(t) <= max(2 C0, 8 C1 C2) (1 + t)^{-1/q}`.
pub fn check_salem3(samples: &[(f64, f64)], q: f64, c0: f64, c1: f64, c2: f64) -> Result<Verdict> {
    check_sorted(samples)?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid("q", format!("need q in [1, inf), got {q}")));
    }
    let mut hyp: Vec<(bool, String)> = Vec::new();
    for &(t, f) in samples {
        hyp.push((f >= 0.0 && le(f, c0), format!("0 <= f <= C0 fails at t = {t}: f = {f}")));
    }
    let mut integral = 0.0;
    for i in 1..samples.len() {
        let (t0, f0) = samples[i - 1];
        let (t1, f1) = samples[i];
        integral += 0.5 * (t1 - t0) * (f0.max(0.0).powf(q) + f1.max(0.0).powf(q));
        let norm = integral.powf(1.0 / q);
        hyp.push((le(norm, c1), format!("||f||_L^q(0,{t1}) = {norm} exceeds C1 = {c1}")));
    }
    for (i, &(t, f)) in samples.iter().enumerate() {
        for &(tau, ftau) in &samples[..=i] {
            if tau <= 0.0 {
                continue;
            }
            let bound = c2 * ftau + c1 * c2 * tau.powf(-1.0 / q);
            if !le(f, bound) {
                hyp.push((false, format!("f({t}) = {f} > C2 f({tau}) + C1 C2 tau^(-1/q) = {bound}")));
            }
        }
    }
    let k = (2.0 * c0).max(8.0 * c1 * c2);
    let concl: Vec<(bool, String)> = samples
        .iter()
        .map(|&(t, f)| {
            let bound = k * (1.0 + t).powf(-1.0 / q);
            (le(f, bound), format!("conclusion fails at t = {t}: f = {f} > {bound}"))
        })
        .collect();
    let hyp_fail = first_fail(hyp);
    let concl_fail = first_fail(concl);
    Ok(Verdict {
        hypotheses_hold: hyp_fail.is_none(),
        conclusion_holds: concl_fail.is_none(),
        failure: hyp_fail.or(concl_fail),
    })
}

/// Piecewise-linear interpolation of the samples at `t`.
fn interpolate(samples: &[(f64, f64)], t: f64) -> Option<f64> {
    let k = samples.partition_point(|(s, _)| *s < t);
    if k < samples.len() && samples[k].0 == t {
        return Some(samples[k].1);
    }
    if k == 0 || k == samples.len() {
        return None;
    }
    let (t0, f0) = samples[k - 1];
    let (t1, f1) = samples[k];
    Some(f0 + (f1 - f0) * (t - t0) / (t1 - t0))
}

/// Precondition `2^K eps <= 1/2`. Hypotheses: `0 <= f`, `f <= C3` on the
/// samples in `[1/2, 1)`, and `f(t) <= eps f(t/2) + C4 t^{-K}` at every
/// sampled `t >= 1` with `f(t/2)` interpolated on the mesh. Conclusion:
/// `f(t) <= (C3 + 2 C4) t^{-K}` for sampled `t >= 1`.
pub fn check_lemit(samples: &[(f64, f64)], eps: f64, k: f64, c3: f64, c4: f64) -> Result<Verdict> {
    check_sorted(samples)?;
    if !(eps > 0.0 && k > 0.0) {
        return Err(invalid("eps", format!("need eps > 0 and K > 0, got eps = {eps}, K = {k}")));
    }
    if 2f64.powf(k) * eps > 0.5 * (1.0 + 1e-12) {
        return Err(invalid("eps", format!("2^K eps = {} exceeds 1/2", 2f64.powf(k) * eps)));
    }
    if samples[0].0 > 0.5 || samples.last().map_or(true, |s| s.0 < 1.0) {
        return Err(Error::InsufficientSamples("samples must cover [1/2, 1]".into()));
    }
    let mut hyp: Vec<(bool, String)> = Vec::new();
    for &(t, f) in samples {
        hyp.push((f >= 0.0, format!("f({t}) = {f} is negative")));
        if (0.5..1.0).contains(&t) {
            hyp.push((le(f, c3), format!("f({t}) = {f} exceeds C3 = {c3} on [1/2, 1)")));
        }
        if t >= 1.0 {
            let half = interpolate(samples, t / 2.0).expect("t/2 inside the mesh");
            let bound = eps * half + c4 * t.powf(-k);
            hyp.push((le(f, bound), format!("f({t}) = {f} > eps f(t/2) + C4 t^-K = {bound}")));
        }
    }
    let concl: Vec<(bool, String)> = samples
        .iter()
        .filter(|(t, _)| *t >= 1.0)
        .map(|&(t, f)| {
            let bound = (c3 + 2.0 * c4) * t.powf(-k);
            (le(f, bound), format!("conclusion fails at t = {t}: f = {f} > {bound}"))
        })
        .collect();
    let hyp_fail = first_fail(hyp);
    let concl_fail = first_fail(concl);
    Ok(Verdict {
        hypotheses_hold: hyp_fail.is_none(),
        conclusion_holds: concl_fail.is_none(),
        failure: hyp_fail.or(concl_fail),
    })
}

/// Canonical cases used by the verification suite and the tests:
/// `(name, verdict, expected_to_hold)`.
pub fn canonical_cases() -> Result<Vec<(&'static str, Verdict, bool)>> {
    let mesh: Vec<f64> = (0..=400).map(|i| i as f64 * 0.25).collect();
    let (c0, q) = (2.0, 2.0);
    // f = C0 (1+t)^{-1/q}: decreasing, so C2 = 1 works; C1 is its L^q norm on the mesh.
    let f: Vec<(f64, f64)> = mesh.iter().map(|&t| (t, c0 * (1.0 + t).powf(-1.0 / q))).collect();
    let c1 = lq_norm(&f, q);
    let mut out = vec![("salem3: decaying power law", check_salem3(&f, q, c0, c1, 1.0)?, true)];
    let zero: Vec<(f64, f64)> = mesh.iter().map(|&t| (t, 0.0)).collect();
    out.push(("salem3: zero", check_salem3(&zero, q, 1.0, 1.0, 1.0)?, true));
    // A constant has L^q(0,t) norm growing like t^{1/q}; a finite C1 fails.
    let flat: Vec<(f64, f64)> = mesh.iter().map(|&t| (t, c0)).collect();
    out.push(("salem3: constant with finite C1", check_salem3(&flat, q, c0, 5.0, 1.0)?, false));

    let kk = 1.5;
    let c4 = 0.7;
    let eps = 2f64.powf(-kk) / 2.0;
    let lmesh: Vec<f64> = (0..=200).map(|i| 0.5 * 200f64.powf(i as f64 / 200.0)).collect();
    let g: Vec<(f64, f64)> = lmesh.iter().map(|&t| (t, c4 * t.powf(-kk))).collect();
    let c3 = c4 * 2f64.powf(kk);
    out.push(("lemit: power law", check_lemit(&g, eps, kk, c3, c4)?, true));
    let zero: Vec<(f64, f64)> = lmesh.iter().map(|&t| (t, 0.0)).collect();
    out.push(("lemit: zero", check_lemit(&zero, eps, kk, 1.0, 1.0)?, true));
    // Decays too slowly for the recursion: t^{-K/3}.
    let slow: Vec<(f64, f64)> = lmesh.iter().map(|&t| (t, c4 * t.powf(-kk / 3.0))).collect();
    out.push(("lemit: slow decay", check_lemit(&slow, eps, kk, c3, c4)?, false));
    Ok(out)
}

fn lq_norm(f: &[(f64, f64)], q: f64) -> f64 {
    f.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1.powf(q) + w[1].1.powf(q))).sum::<f64>().powf(1.0 / q)
}

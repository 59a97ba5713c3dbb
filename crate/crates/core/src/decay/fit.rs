use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `value = A (1 + t)^{-exponent}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples: usize,
    pub prefactor: f64,
}

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 8;

/// Fit on the samples with `t` in `window`. `horizon` is the largest
/// admissible `t_max` (the torus horizon `0.1 (l / 2 pi)^2`); pass
/// `f64::INFINITY` for data that does not come from a periodic box.
pub fn fit_decay(series: &[(f64, f64)], window: (f64, f64), horizon: f64) -> Result<DecayFit> {
    let (t0, t1) = window;
    if !(t0 >= 0.0 && t1 > t0) {
        return Err(Error::FitWindow(format!("window [{t0}, {t1}] is empty or negative")));
    }
    if t1 > horizon {
        return Err(Error::FitWindow(format!(
            "t_max = {t1} exceeds the torus horizon 0.1 (l/2pi)^2 = {horizon}"
        )));
    }
    let inside: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= t0 && *t <= t1).collect();
    if let Some(&(t, value)) = inside.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::NonPositiveValue { t, value });
    }
    if inside.len() < MIN_FIT_SAMPLES {
        return Err(Error::FitWindow(format!(
            "{} samples in [{t0}, {t1}], need at least {MIN_FIT_SAMPLES}",
            inside.len()
        )));
    }
    let (lo, hi) = inside.iter().fold((f64::INFINITY, 0.0_f64), |(l, h), (t, _)| (l.min(*t), h.max(*t)));
    if !(lo > 0.0 && hi >= 10.0 * lo * (1.0 - 1e-12)) {
        return Err(Error::FitWindow(format!("samples span [{lo}, {hi}], less than one decade")));
    }
    let n = inside.len() as f64;
    let xs: Vec<f64> = inside.iter().map(|(t, _)| t.ln_1p()).collect();
    let ys: Vec<f64> = inside.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    Ok(DecayFit { exponent: -slope, stderr, window, r_squared, samples: inside.len(), prefactor: intercept.exp() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..60).map(|i| 10f64.powf(-0.5 + 2.5 * i as f64 / 59.0)).map(|t| (t, f(t))).collect()
    }

    #[test]
    fn pure_power_law() {
        let fit = fit_decay(&series(|t| 3.0 * (1.0 + t).powf(-0.5)), (1.0, 100.0), 400.0).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12);
        assert!(fit.stderr < 1e-10);
        assert!((fit.prefactor - 3.0).abs() < 1e-10);
    }

    #[test]
    fn constant_has_zero_exponent() {
        let fit = fit_decay(&series(|_| 2.0), (1.0, 100.0), 400.0).unwrap();
        assert!(fit.exponent.abs() < 1e-14);
    }

    #[test]
    fn log_periodic_perturbation() {
        let fit = fit_decay(&series(|t| (1.0 + t).powi(-1) * (1.0 + 0.01 * t.ln_1p().sin())), (1.0, 100.0), 400.0).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.02);
    }

    #[test]
    fn rejections() {
        let s = series(|t| 1.0 / (1.0 + t));
        assert!(matches!(fit_decay(&s, (1.0, 100.0), 50.0), Err(Error::FitWindow(m)) if m.contains("50")));
        assert!(fit_decay(&s, (1.0, 5.0), 400.0).is_err());
        let mut bad = s.clone();
        bad[40].1 = 0.0;
        assert!(matches!(fit_decay(&bad, (1.0, 100.0), 400.0), Err(Error::NonPositiveValue { .. })));
    }
}

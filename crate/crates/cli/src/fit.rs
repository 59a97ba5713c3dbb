use std::path::Path;

use anyhow::Context;
use nsdecay_core::decay::{default_tolerance, fit_decay, predicted_exponent, DecayFit, DecayReport};
use serde::Serialize;

use crate::{classify, output, CliResult, Failure};

#[derive(Serialize)]
struct FitSummary {
    norm: String,
    window: (f64, f64),
    horizon: Option<f64>,
    fit: DecayFit,
    predicted: Option<f64>,
    tolerance: Option<f64>,
    pass: Option<bool>,
}

/// `(theta, p, is_l2)` of a cached norm column.
fn norm_indices(report: &DecayReport, norm: &str) -> Option<(f64, f64, bool)> {
    match norm {
        "L2" => Some((0.0, 2.0, true)),
        "B0_2_1" => Some((0.0, 2.0, false)),
        _ => report.config.data.p_report.iter().find(|t| t.label() == norm).map(|t| (t.theta, t.p, false)),
    }
}

pub fn cmd(run_dir: &Path, norm: &str, t_min: f64, t_max: f64, horizon: Option<f64>) -> CliResult<()> {
    let report_path = run_dir.join("report.json");
    let report: Option<DecayReport> = if report_path.exists() {
        let text = std::fs::read_to_string(&report_path)
            .with_context(|| format!("reading {}", report_path.display()))
            .map_err(Failure::Validation)?;
        Some(
            serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", report_path.display()))
                .map_err(Failure::Validation)?,
        )
    } else {
        None
    };
    let horizon = horizon.or(report.as_ref().map(|r| r.torus_horizon));
    let series = output::read_series(&run_dir.join("norms.csv"), norm).map_err(Failure::Validation)?;
    let fit = fit_decay(&series, (t_min, t_max), horizon.unwrap_or(f64::INFINITY)).map_err(classify)?;

    let expectation = report.as_ref().and_then(|r| {
        let (theta, p, is_l2) = norm_indices(r, norm)?;
        let cfg = &r.config;
        let predicted = predicted_exponent(cfg.data.sigma, theta, p, cfg.solver.linear);
        let tol = cfg.fit.tolerance.unwrap_or_else(|| default_tolerance(cfg.data.sigma, theta, p, is_l2, cfg.solver.linear));
        Some((predicted, tol))
    });
    let pass = expectation.map(|(pred, tol)| (fit.exponent - pred).abs() <= tol);
    let summary = FitSummary {
        norm: norm.into(),
        window: (t_min, t_max),
        horizon,
        fit,
        predicted: expectation.map(|e| e.0),
        tolerance: expectation.map(|e| e.1),
        pass,
    };
    let json = serde_json::to_string_pretty(&summary).expect("fit serializes");
    std::fs::write(run_dir.join("fit.json"), json + "\n")
        .context("writing fit.json")
        .map_err(Failure::Runtime)?;

    print!("{norm}: exponent {:.6} +- {:.6} over [{t_min}, {t_max}] ({} samples)", fit.exponent, fit.stderr, fit.samples);
    match (expectation, pass) {
        (Some((pred, tol)), Some(ok)) => {
            println!("  predicted {pred:.4} +- {tol}  {}", if ok { "PASS" } else { "FAIL" });
            if !ok {
                return Err(Failure::Acceptance(format!(
                    "{norm} exponent {:.4} differs from {pred:.4} by more than {tol}",
                    fit.exponent
                )));
            }
        }
        _ => println!(),
    }
    Ok(())
}

use std::path::Path;

use anyhow::Context;
use rayon::prelude::*;
use serde::Serialize;

use crate::{classify, config, simulate, CliResult, Failure};

#[derive(Serialize)]
struct SweepEntry {
    dir: String,
    sigma: f64,
    seed: u64,
    rho_amplitude: f64,
    /// `(norm, fitted exponent, predicted, pass)`.
    fits: Vec<(String, Option<f64>, f64, bool)>,
    error: Option<String>,
    pass: bool,
}

pub fn cmd(config_path: &Path, sigmas: &[f64], seeds: &[u64], rhos: &[f64], out: &Path) -> CliResult<()> {
    let base = config::load(config_path)?;
    let or = |v: &[f64], d: f64| if v.is_empty() { vec![d] } else { v.to_vec() };
    let sigmas = or(sigmas, base.data.sigma);
    let rhos = or(rhos, base.data.rho_amplitude);
    let seeds = if seeds.is_empty() { vec![base.data.seed] } else { seeds.to_vec() };

    let mut jobs = Vec::new();
    for &sigma in &sigmas {
        for &rho in &rhos {
            for &seed in &seeds {
                let mut cfg = base.clone();
                cfg.data.sigma = sigma;
                cfg.data.rho_amplitude = rho;
                cfg.data.seed = seed;
                cfg.validate().map_err(classify)?;
                jobs.push((format!("run_{:03}", jobs.len()), cfg));
            }
        }
    }

    let entries: Vec<SweepEntry> = jobs
        .par_iter()
        .map(|(name, cfg)| {
            let (fits, error, pass) = match simulate::execute(cfg, &out.join(name)) {
                Ok(rep) => (
                    rep.fits.iter().map(|f| (f.norm.clone(), f.fit.map(|x| x.exponent), f.predicted, f.pass)).collect(),
                    None,
                    rep.pass,
                ),
                Err(Failure::Validation(e) | Failure::Runtime(e)) => (Vec::new(), Some(format!("{e:#}")), false),
                Err(Failure::Acceptance(m)) => (Vec::new(), Some(m), false),
            };
            SweepEntry {
                dir: name.clone(),
                sigma: cfg.data.sigma,
                seed: cfg.data.seed,
                rho_amplitude: cfg.data.rho_amplitude,
                fits,
                error,
                pass,
            }
        })
        .collect();

    for e in &entries {
        println!(
            "{}  sigma {}  rho {}  seed {}  {}",
            e.dir,
            e.sigma,
            e.rho_amplitude,
            e.seed,
            match &e.error {
                Some(err) => format!("error: {err}"),
                None if e.pass => "PASS".into(),
                None => "FAIL".into(),
            }
        );
    }
    let json = serde_json::to_string_pretty(&entries).expect("sweep serializes");
    std::fs::write(out.join("sweep.json"), json + "\n")
        .context("writing sweep.json")
        .map_err(Failure::Runtime)?;
    if entries.iter().any(|e| e.error.is_some()) {
        return Err(Failure::Runtime(anyhow::anyhow!("some runs failed; see sweep.json")));
    }
    if entries.iter().any(|e| !e.pass) {
        return Err(Failure::Acceptance("some runs missed their predicted exponents; see sweep.json".into()));
    }
    Ok(())
}

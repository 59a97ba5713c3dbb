use std::path::{Path, PathBuf};

use anyhow::Context;
use nsdecay_core::decay::{assemble_report, prepare, DecayReport, ExperimentConfig};
use nsdecay_core::duhamel::{duhamel_residual, MIN_NODES};
use nsdecay_core::solver::{run_with, write_checkpoint, Trajectory};

use crate::{classify, config, output, CliResult, Failure};

pub const SERIES_FILES: [&str; 4] = ["norms.csv", "energy.csv", "density.csv", "duhamel.csv"];

pub fn cmd(config_path: &Path, out: Option<PathBuf>) -> CliResult<()> {
    let cfg = config::load(config_path)?;
    let dir = out.unwrap_or_else(|| config_path.with_file_name("run"));
    let report = execute(&cfg, &dir)?;
    print_summary(&report, &dir);
    Ok(())
}

/// Run `cfg` and write the full run directory.
pub fn execute(cfg: &ExperimentConfig, dir: &Path) -> CliResult<DecayReport> {
    let io = |e: std::io::Error| Failure::Runtime(anyhow::Error::new(e).context(format!("writing {}", dir.display())));
    std::fs::create_dir_all(dir.join("checkpoints")).map_err(io)?;

    let mut prep = prepare(cfg).map_err(classify)?;
    if prep.options.keep_states_until.is_none() {
        prep.options.keep_states_until = Some(cfg.norms.dense_until.min(cfg.solver.t_end));
    }
    let hash = config::hash(cfg);
    let last = prep.options.save_times.last().copied().unwrap_or(0.0);
    let mut next_decade = 1.0;
    let mut written = 0usize;
    let traj = run_with(&prep.state, &cfg.solver, &prep.family, &prep.options, |s| {
        // t = 0, the first save past each power of ten, and the final state
        let due = s.t == 0.0 || s.t >= next_decade || s.t == last;
        if due {
            while s.t >= next_decade {
                next_decade *= 10.0;
            }
            write_checkpoint(&dir.join("checkpoints").join(format!("ckpt_{written:04}.bin")), s, &hash)?;
            written += 1;
        }
        Ok(())
    })
    .map_err(classify)?;

    let mut report = assemble_report(cfg, &prep, &traj).map_err(classify)?;
    report.series_files = SERIES_FILES.iter().map(|s| s.to_string()).collect();
    let rows = duhamel_rows(&traj).map_err(classify)?;

    let write = |r: anyhow::Result<()>| r.map_err(Failure::Runtime);
    write(output::write_norms(&dir.join("norms.csv"), &traj))?;
    write(output::write_energy(&dir.join("energy.csv"), &traj))?;
    write(output::write_density(&dir.join("density.csv"), &traj))?;
    write(output::write_duhamel(&dir.join("duhamel.csv"), &rows))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write(std::fs::write(dir.join("report.json"), json + "\n").context("writing report.json"))?;
    Ok(report)
}

/// Integral-form residual at `t = 0` and at every retained save with
/// enough quadrature nodes.
fn duhamel_rows(traj: &Trajectory) -> nsdecay_core::Result<Vec<(f64, f64, usize)>> {
    let mut rows = Vec::new();
    for (i, s) in traj.states.iter().enumerate() {
        let nodes = i + 1;
        if s.t == 0.0 || nodes >= MIN_NODES {
            rows.push((s.t, duhamel_residual(traj, s.t)?, nodes));
        }
    }
    Ok(rows)
}

fn print_summary(report: &DecayReport, dir: &Path) {
    println!("run directory: {}", dir.display());
    println!(
        "steps {}  samples {}  horizon {:.4}  energy ledger {}",
        report.steps,
        report.samples,
        report.torus_horizon,
        if report.energy.monotone { "monotone" } else { "NOT monotone" }
    );
    for f in &report.fits {
        match (&f.fit, &f.error) {
            (Some(fit), _) => println!(
                "{:<8} exponent {:.4} +- {:.4}  predicted {:.4} +- {:.2}  {}",
                f.norm,
                fit.exponent,
                fit.stderr,
                f.predicted,
                f.tolerance,
                if f.pass { "PASS" } else { "FAIL" }
            ),
            (None, Some(e)) => println!("{:<8} no fit: {e}", f.norm),
            (None, None) => {}
        }
    }
}

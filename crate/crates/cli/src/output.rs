//! CSV artifacts. Floats are written with 17 significant digits so that
//! they read back bit for bit.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nsdecay_core::solver::Trajectory;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows(path: &Path, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(float))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_norms(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut header: Vec<String> = vec!["t".into(), "L2".into(), "B0_2_1".into()];
    header.extend(traj.tracked.iter().map(|t| t.label()));
    write_rows(
        path,
        &header,
        traj.norms.iter().map(|r| {
            let mut row = vec![r.t, r.l2, r.b0_2_1];
            row.extend(&r.tracked);
            row
        }),
    )
}

pub fn write_energy(path: &Path, traj: &Trajectory) -> Result<()> {
    let header = ["t", "kinetic", "dissipation", "total", "budget"].map(String::from);
    write_rows(path, &header, traj.energy.iter().map(|r| vec![r.t, r.kinetic, r.dissipation, r.total, r.budget]))
}

pub fn write_density(path: &Path, traj: &Trajectory) -> Result<()> {
    let header = ["t", "rho_min", "rho_max"].map(String::from);
    write_rows(path, &header, traj.density.iter().map(|r| vec![r.t, r.rho_min, r.rho_max]))
}

/// `(t, residual, nodes)` rows.
pub fn write_duhamel(path: &Path, rows: &[(f64, f64, usize)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["t", "residual", "nodes"])?;
    for &(t, r, n) in rows {
        w.write_record([float(t), float(r), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One named column of a CSV file as `(t, value)` pairs.
pub fn read_series(path: &Path, column: &str) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = r.headers()?.clone();
    let Some(k) = headers.iter().position(|h| h == column) else {
        let known: Vec<&str> = headers.iter().skip(1).collect();
        bail!("no column `{column}` in {} (available: {})", path.display(), known.join(", "));
    };
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .context("short row")?
                .parse::<f64>()
                .with_context(|| format!("row {} of {}", line + 2, path.display()))
        };
        out.push((parse(0)?, parse(k)?));
    }
    Ok(out)
}

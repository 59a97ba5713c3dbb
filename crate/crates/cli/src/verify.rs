use std::path::Path;

use anyhow::Context;
use nsdecay_core::suites::{run_suite, Suite, SuiteReport};

use crate::{classify, CliResult, Failure};

pub fn cmd(name: &str, seed: u64, out: &Path) -> CliResult<()> {
    let suites: Vec<Suite> = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![name.parse::<Suite>().map_err(classify)?]
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for s in suites {
        let r = run_suite(s, seed).map_err(classify)?;
        for c in &r.checks {
            println!(
                "{} {:<8} {:<42} {:>11.3e}  (threshold {:.3e})",
                if c.pass { "PASS" } else { "FAIL" },
                s,
                c.name,
                c.value,
                c.threshold
            );
        }
        reports.push(r);
    }
    let json = serde_json::to_string_pretty(&reports).expect("results serialize");
    std::fs::write(out, json + "\n")
        .with_context(|| format!("writing {}", out.display()))
        .map_err(Failure::Runtime)?;
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.pass).map(move |c| format!("{}: {}", r.suite, c.name)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Acceptance(failed.join("; ")))
    }
}

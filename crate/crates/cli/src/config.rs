use std::path::Path;

use anyhow::Context;
use nsdecay_core::decay::ExperimentConfig;
use sha2::{Digest, Sha256};

use crate::{classify, CliResult, Failure};

/// Parse and validate a TOML experiment file. Unknown keys are errors.
pub fn load(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Validation)?;
    let cfg: ExperimentConfig = toml::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::Validation)?;
    cfg.validate().map_err(classify)?;
    Ok(cfg)
}

/// Hex SHA-256 of the config's JSON form, stamped into checkpoints.
pub fn hash(cfg: &ExperimentConfig) -> String {
    let json = serde_json::to_vec(cfg).expect("config serializes");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}

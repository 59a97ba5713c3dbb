//! Checkpoint files: one JSON header line, then the spectral coefficients of
//! `a`, `u_x`, `u_y` as little-endian `f64` pairs `(re, im)` in stored mode
//! order.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field2d::{Field2D, Grid2D, VectorField2D};

use super::state::FluidState;

pub const CHECKPOINT_FORMAT: &str = "nsdecay-checkpoint-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub format: String,
    pub n: usize,
    pub l: f64,
    pub t: f64,
    pub config_hash: String,
    /// Fields in record order.
    pub fields: Vec<String>,
    /// Complex coefficients per field.
    pub modes: usize,
}

pub fn write_checkpoint(path: &Path, state: &FluidState, config_hash: &str) -> Result<()> {
    let g = state.grid();
    let header = CheckpointHeader {
        format: CHECKPOINT_FORMAT.into(),
        n: g.n(),
        l: g.l(),
        t: state.t,
        config_hash: config_hash.into(),
        fields: vec!["a".into(), "u_x".into(), "u_y".into()],
        modes: g.spectral_len(),
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for f in [&state.a, &state.u.x, &state.u.y] {
        for z in f.spectral().iter() {
            out.write_all(&z.re.to_le_bytes())?;
            out.write_all(&z.im.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<(CheckpointHeader, FluidState)> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: CheckpointHeader = serde_json::from_str(line.trim_end())?;
    if header.format != CHECKPOINT_FORMAT {
        return Err(Error::Checkpoint(format!("unknown format `{}`", header.format)));
    }
    let grid = Grid2D::new(header.n, header.l)?;
    if header.modes != grid.spectral_len() || header.fields.len() != 3 {
        return Err(Error::Checkpoint("header does not match the grid layout".into()));
    }
    let mut read_field = || -> Result<Field2D> {
        let mut buf = vec![0u8; 16 * header.modes];
        r.read_exact(&mut buf).map_err(|e| Error::Checkpoint(format!("truncated record: {e}")))?;
        let c = buf
            .chunks_exact(16)
            .map(|b| {
                let re = f64::from_le_bytes(b[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(b[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        Ok(Field2D::from_spectral_unchecked(&grid, c))
    };
    let a = read_field()?;
    let ux = read_field()?;
    let uy = read_field()?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", rest.len())));
    }
    let mut state = FluidState::new(a, VectorField2D { x: ux, y: uy })?;
    state.t = header.t;
    Ok((header, state))
}

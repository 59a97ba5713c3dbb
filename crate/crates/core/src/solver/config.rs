use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::field2d::Grid2D;

/// Dealiasing rule for quadratic terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DealiasRule {
    #[default]
    TwoThirds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub dealias: DealiasRule,
    /// Strength of the exponential filter applied to `a` once per step; 0 disables it.
    #[serde(default)]
    pub density_filter_strength: f64,
    #[serde(default = "default_pressure_tol")]
    pub pressure_tol: f64,
    #[serde(default = "default_pressure_max_iter")]
    pub pressure_max_iter: usize,
    /// Drop every term except viscous diffusion (heat-flow baseline).
    #[serde(default)]
    pub linear: bool,
}

fn default_pressure_tol() -> f64 {
    1e-10
}

fn default_pressure_max_iter() -> usize {
    100
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            dealias: DealiasRule::TwoThirds,
            density_filter_strength: 0.0,
            pressure_tol: default_pressure_tol(),
            pressure_max_iter: default_pressure_max_iter(),
            linear: false,
        }
    }

    pub fn linear(mut self, on: bool) -> Self {
        self.linear = on;
        self
    }

    /// Parameter checks that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        if !(self.density_filter_strength >= 0.0) {
            return Err(invalid("density_filter_strength", "must be >= 0"));
        }
        if !(self.pressure_tol > 0.0) {
            return Err(invalid("pressure_tol", "must be positive"));
        }
        if self.pressure_max_iter == 0 {
            return Err(invalid("pressure_max_iter", "must be at least 1"));
        }
        Ok(())
    }

    /// Explicit-term stability bounds `dt <= h^2 / 2` and `dt <= h / (2 max|u|)`.
    pub fn check_stability(&self, grid: &Grid2D, max_u: f64) -> Result<()> {
        self.validate()?;
        let h = grid.spacing();
        let diffusive = 0.5 * h * h;
        if self.dt > diffusive {
            return Err(Error::Stability(format!("dt = {} exceeds h^2/2 = {diffusive:.6}", self.dt)));
        }
        if max_u > 0.0 {
            let advective = 0.5 * h / max_u;
            if self.dt > advective {
                return Err(Error::Stability(format!("dt = {} exceeds h/(2 max|u|) = {advective:.6}", self.dt)));
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

use serde::{Deserialize, Serialize};

use crate::besov::besov_from_blocks;
use crate::dyadic::{block_norms_vec, LPFamily};
use crate::error::{invalid, Error, Result};
use crate::field2d::{Grid2D, VectorField2D};

use super::config::SolverConfig;
use super::diagnostics::{dissipation_rate, hyper_dissipation, kinetic_energy, EnergyRecord};
use super::state::FluidState;
use super::step::Stepper;

/// A tracked norm `B^theta_{p,1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackedNorm {
    pub theta: f64,
    pub p: f64,
}

impl TrackedNorm {
    /// Column label, e.g. `B1_2_1`.
    pub fn label(&self) -> String {
        format!("B{}_{}_1", self.theta, self.p)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormRecord {
    pub t: f64,
    pub l2: f64,
    pub b0_2_1: f64,
    pub tracked: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DensityRecord {
    pub t: f64,
    pub rho_min: f64,
    pub rho_max: f64,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Strictly increasing times in `(0, t_end]`; `t = 0` is always recorded.
    pub save_times: Vec<f64>,
    pub tracked: Vec<TrackedNorm>,
    /// Full states are kept for save times `<= keep_states_until`.
    pub keep_states_until: Option<f64>,
    /// `rho_0 u_0` as produced by the data generator; computed from the
    /// initial state when absent.
    pub rho_u0: Option<VectorField2D>,
}

/// Summary of the run's pressure solves.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct PressureSummary {
    pub max_iterations: usize,
    pub max_contraction: f64,
}

/// Output of [`run`]: norm caches, energy ledger and density extrema at the
/// save times, plus the retained states.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: Grid2D,
    pub config: SolverConfig,
    pub tracked: Vec<TrackedNorm>,
    pub norms: Vec<NormRecord>,
    pub energy: Vec<EnergyRecord>,
    pub density: Vec<DensityRecord>,
    pub states: Vec<FluidState>,
    pub rho_u0: VectorField2D,
    pub pressure: PressureSummary,
    pub steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.norms.iter().map(|r| r.t).collect()
    }

    /// Retained state at time `t`, matched exactly.
    pub fn state_at(&self, t: f64) -> Option<&FluidState> {
        self.states.iter().find(|s| s.t == t)
    }

    /// Series `(t, value)` of a cached norm: `"L2"`, `"B0_2_1"` or a tracked label.
    pub fn series(&self, name: &str) -> Option<Vec<(f64, f64)>> {
        let pick: Box<dyn Fn(&NormRecord) -> f64> = match name {
            "L2" => Box::new(|r| r.l2),
            "B0_2_1" => Box::new(|r| r.b0_2_1),
            _ => {
                let k = self.tracked.iter().position(|t| t.label() == name)?;
                Box::new(move |r| r.tracked[k])
            }
        };
        Some(self.norms.iter().map(|r| (r.t, pick(r))).collect())
    }
}

fn norm_record(u: &VectorField2D, t: f64, tracked: &[TrackedNorm], fam: &LPFamily) -> Result<NormRecord> {
    let b2 = block_norms_vec(u, 2.0, fam)?;
    let mut cache: Vec<(f64, crate::dyadic::DyadicSpectrum)> = vec![(2.0, b2.clone())];
    let mut values = Vec::with_capacity(tracked.len());
    for tn in tracked {
        let blocks = match cache.iter().find(|(p, _)| *p == tn.p) {
            Some((_, b)) => b.clone(),
            None => {
                let b = block_norms_vec(u, tn.p, fam)?;
                cache.push((tn.p, b.clone()));
                b
            }
        };
        values.push(besov_from_blocks(&blocks, tn.theta, 1.0));
    }
    Ok(NormRecord { t, l2: u.norm_l2(), b0_2_1: besov_from_blocks(&b2, 0.0, 1.0), tracked: values })
}

fn density_record(s: &FluidState) -> DensityRecord {
    if s.is_homogeneous() {
        return DensityRecord { t: s.t, rho_min: 1.0, rho_max: 1.0 };
    }
    let (lo, hi) = s.a.min_max();
    // rho = 1/(1+a) is decreasing in a
    DensityRecord { t: s.t, rho_min: 1.0 / (1.0 + hi), rho_max: 1.0 / (1.0 + lo) }
}

/// Integrate from `ic` to the last save time, recording caches at each save.
/// `on_save` sees every recorded state (including `t = 0`).
pub fn run_with(
    ic: &FluidState,
    cfg: &SolverConfig,
    fam: &LPFamily,
    opts: &RunOptions,
    mut on_save: impl FnMut(&FluidState) -> Result<()>,
) -> Result<Trajectory> {
    let grid = ic.grid().clone();
    fam.grid().eq(&grid).then_some(()).ok_or(Error::GridMismatch)?;
    cfg.check_stability(&grid, ic.u.max_abs())?;
    for w in opts.save_times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(invalid("save_times", format!("must increase strictly: {} then {}", w[0], w[1])));
        }
    }
    if let Some(&first) = opts.save_times.first() {
        if !(first > ic.t) {
            return Err(invalid("save_times", format!("first save {first} not after start {}", ic.t)));
        }
    }
    if let Some(&last) = opts.save_times.last() {
        if last > cfg.t_end * (1.0 + 1e-12) {
            return Err(invalid("save_times", format!("last save {last} beyond t_end {}", cfg.t_end)));
        }
    }
    for tn in &opts.tracked {
        if !(tn.p >= 1.0) {
            return Err(invalid("tracked", format!("p must be >= 1, got {}", tn.p)));
        }
    }

    let rho_u0 = match &opts.rho_u0 {
        Some(v) => v.clone(),
        None => ic.u.scalar_product(&ic.density())?,
    };
    let keep = |t: f64| opts.keep_states_until.is_some_and(|k| t <= k);

    let mut stepper = Stepper::new(&grid, cfg)?;
    let mut state = ic.clone();
    let mut norms = vec![norm_record(&state.u, state.t, &opts.tracked, fam)?];
    let mut density = vec![density_record(&state)];
    let mut dissipation = 0.0;
    let mut budget = 0.0;
    let mut rate = dissipation_rate(&state.u);
    let mut energy = vec![EnergyRecord::new(state.t, kinetic_energy(&state), 0.0, 0.0)];
    let mut states = Vec::new();
    if keep(state.t) {
        states.push(state.clone());
    }
    on_save(&state)?;

    let mut steps = 0;
    for &target in &opts.save_times {
        while state.t < target {
            let remaining = target - state.t;
            let h = if remaining <= cfg.dt * (1.0 + 1e-9) { remaining } else { cfg.dt };
            let landing = h == remaining;
            let hyper = hyper_dissipation(&state.u);
            let mut next = stepper.step(&state, h)?;
            if landing {
                next.t = target;
            }
            let next_rate = dissipation_rate(&next.u);
            dissipation += 0.5 * h * (rate + next_rate);
            budget += 10.0 * h.powi(3) * hyper.max(hyper_dissipation(&next.u));
            rate = next_rate;
            state = next;
            steps += 1;
        }
        norms.push(norm_record(&state.u, state.t, &opts.tracked, fam)?);
        density.push(density_record(&state));
        energy.push(EnergyRecord::new(state.t, kinetic_energy(&state), dissipation, budget));
        if keep(state.t) {
            states.push(state.clone());
        }
        on_save(&state)?;
    }

    Ok(Trajectory {
        grid,
        config: cfg.clone(),
        tracked: opts.tracked.clone(),
        norms,
        energy,
        density,
        states,
        rho_u0,
        pressure: PressureSummary {
            max_iterations: stepper.max_pressure_iterations,
            max_contraction: stepper.max_contraction,
        },
        steps,
    })
}

pub fn run(ic: &FluidState, cfg: &SolverConfig, fam: &LPFamily, opts: &RunOptions) -> Result<Trajectory> {
    run_with(ic, cfg, fam, opts, |_| Ok(()))
}

/// `count` save times evenly spaced on `(0, t_end]`.
pub fn uniform_save_times(t_end: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| t_end * i as f64 / count as f64).collect()
}

/// Save times combining a dense uniform start on `(0, t_dense]` with
/// `per_decade` log-spaced times up to `t_end`, each snapped to a multiple of `dt`.
pub fn mixed_save_times(t_dense: f64, dense_count: usize, t_end: f64, per_decade: usize, dt: f64) -> Vec<f64> {
    let mut out = uniform_save_times(t_dense, dense_count);
    if t_end > t_dense && per_decade > 0 {
        let decades = (t_end / t_dense).log10();
        let count = (decades * per_decade as f64).ceil() as usize;
        for i in 1..=count {
            let t = t_dense * 10f64.powf(decades * i as f64 / count as f64);
            let snapped = ((t / dt).round() * dt).min(t_end);
            if snapped > *out.last().unwrap_or(&0.0) {
                out.push(snapped);
            }
        }
    }
    out
}

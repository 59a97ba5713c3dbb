//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use nsdecay_core::decay::{make_initial_data, InitialDataSpec, PhaseModel};
use nsdecay_core::{build_family, FluidState, LPFamily, TransitionProfile};

/// Experiment-like state on an `n x n` grid with the same resolution as the
/// acceptance runs (`l / n = pi / 4`).
pub fn state(n: usize, rho_amplitude: f64) -> (LPFamily, FluidState) {
    let grid = nsdecay_core::Grid2D::new(n, PI * n as f64 / 4.0).expect("grid");
    let fam = build_family(&grid, TransitionProfile::default()).expect("family");
    let spec = InitialDataSpec { sigma: 1.0, amplitude: 0.1, rho_amplitude, seed: 1, phases: PhaseModel::Localized, p_report: vec![] };
    let data = make_initial_data(&spec, &fam).expect("data");
    let st = FluidState::new(data.a0, data.u0).expect("state");
    (fam, st)
}

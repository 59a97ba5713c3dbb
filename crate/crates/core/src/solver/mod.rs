//! Time integration of the variable-density system on the periodic box.

mod checkpoint;
mod config;
mod diagnostics;
mod run;
mod state;
mod step;

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointHeader};
pub use config::{DealiasRule, SolverConfig};
pub use diagnostics::{
    check_ledger, check_smallness, density_bounds, dissipation_rate, energy_ledger, hyper_dissipation, kinetic_energy,
    DensityBounds, EnergyRecord, LedgerCheck, SmallnessReport,
};
pub use run::{
    mixed_save_times, run, run_with, uniform_save_times, DensityRecord, NormRecord, PressureSummary, RunOptions,
    TrackedNorm, Trajectory,
};
pub use state::FluidState;
pub use step::{step, tendency, Stepper, Tendency};

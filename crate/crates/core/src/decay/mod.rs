//! Initial data, decay fits, decay-lemma checkers and experiment drivers.

mod experiment;
mod fit;
mod initial;
mod lemmas;

pub use experiment::{
    assemble_report, default_tolerance, predicted_exponent, prepare, run_experiment, run_experiment_with_trajectory,
    DecayReport, ExperimentConfig, FitConfig, GridConfig, NormFit, NormsConfig, Prepared,
};
pub use fit::{fit_decay, DecayFit, MIN_FIT_SAMPLES};
pub use initial::{make_initial_data, velocity_envelope, InitialData, InitialDataSpec, NormBundle, PhaseModel, ShellProfile};
pub use lemmas::{canonical_cases, check_lemit, check_salem3, Verdict};

//! Littlewood-Paley analysis, pseudospectral variable-density Navier-Stokes
//! integration and time-decay measurement on a periodic box.

pub mod besov;
pub mod decay;
pub mod duhamel;
pub mod dyadic;
pub mod error;
pub mod field2d;
pub mod paraproduct;
pub mod pressure;
pub mod solver;
pub mod suites;

pub use besov::BesovSpec;
pub use dyadic::{build_family, LPFamily, TransitionProfile};
pub use error::{Error, Result};
pub use field2d::{Field2D, Grid2D, VectorField2D};
pub use solver::{FluidState, SolverConfig, Trajectory};

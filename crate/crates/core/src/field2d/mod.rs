//! Periodic 2-D fields: grid, dual physical/spectral storage, differential
//! operators, Leray projection and the heat semigroup.

mod field;
mod grid;
mod heat;
mod ops;
pub mod random;

pub use field::{Field2D, Representation, VectorField2D};
pub use grid::Grid2D;
pub use heat::{heat_decay_ratio, heat_semigroup, HeatDecayParams, HeatFlow};
pub use ops::{
    advect, curl, divergence, gradient, gradient_part, inverse_laplacian, laplacian, laplacian_vec, leray_project,
    partial_x, partial_y, perp_gradient,
};

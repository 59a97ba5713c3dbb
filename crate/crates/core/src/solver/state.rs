use crate::error::Result;
use crate::field2d::{Field2D, Grid2D, VectorField2D};

/// State of the reformulated system: `a = 1/rho - 1`, velocity `u`, and the
/// pressure gradient from the last solve.
#[derive(Clone, Debug)]
pub struct FluidState {
    pub t: f64,
    pub a: Field2D,
    pub u: VectorField2D,
    pub grad_p: VectorField2D,
}

impl FluidState {
    pub fn new(a: Field2D, u: VectorField2D) -> Result<Self> {
        a.check_grid(&u.x)?;
        let grad_p = VectorField2D::zeros(a.grid());
        Ok(Self { t: 0.0, a, u, grad_p })
    }

    /// Constant density `rho = 1`.
    pub fn homogeneous(u: VectorField2D) -> Self {
        let a = Field2D::zeros(u.grid());
        let grad_p = VectorField2D::zeros(u.grid());
        Self { t: 0.0, a, u, grad_p }
    }

    pub fn grid(&self) -> &Grid2D {
        self.a.grid()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.a.is_zero()
    }

    /// `rho = 1 / (1 + a)` on the grid.
    pub fn density(&self) -> Field2D {
        self.a.map_physical(|a| 1.0 / (1.0 + a))
    }

    /// `rho - 1 = -a / (1 + a)` on the grid.
    pub fn density_deviation(&self) -> Field2D {
        self.a.map_physical(|a| -a / (1.0 + a))
    }

    /// Smallest value of `1 + a` on the grid.
    pub fn min_one_plus_a(&self) -> f64 {
        1.0 + self.a.min_max().0
    }
}

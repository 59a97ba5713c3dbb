//! Spectral differential operators.
//!
//! Every operator is a Fourier multiplier built from the derivative symbols
//! `k~` of [`Grid2D`], whose Nyquist components are zero. Using the same
//! symbol everywhere makes `div grad = laplacian` and `div P v = 0` hold to
//! rounding on the discrete lattice.

use rustfft::num_complex::Complex64;

use super::field::{Field2D, VectorField2D};
use crate::error::Result;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn partial_x(f: &Field2D) -> Field2D {
    let g = f.grid().clone();
    f.map_modes(|i, c| I * g.dkx(g.mode_of(i).0) * c)
}

pub fn partial_y(f: &Field2D) -> Field2D {
    let g = f.grid().clone();
    f.map_modes(|i, c| I * g.dky(g.mode_of(i).1) * c)
}

pub fn gradient(f: &Field2D) -> VectorField2D {
    VectorField2D { x: partial_x(f), y: partial_y(f) }
}

pub fn divergence(v: &VectorField2D) -> Field2D {
    let g = v.grid().clone();
    let a = v.x.spectral();
    let b = v.y.spectral();
    let out = a
        .iter()
        .zip(b.iter())
        .enumerate()
        .map(|(i, (&cx, &cy))| {
            let (ix, iy) = g.mode_of(i);
            I * (g.dkx(ix) * cx + g.dky(iy) * cy)
        })
        .collect();
    Field2D::from_spectral_unchecked(&g, out)
}

/// Scalar curl `d_x v_y - d_y v_x`.
pub fn curl(v: &VectorField2D) -> Field2D {
    let g = v.grid().clone();
    let a = v.x.spectral();
    let b = v.y.spectral();
    let out = a
        .iter()
        .zip(b.iter())
        .enumerate()
        .map(|(i, (&cx, &cy))| {
            let (ix, iy) = g.mode_of(i);
            I * (g.dkx(ix) * cy - g.dky(iy) * cx)
        })
        .collect();
    Field2D::from_spectral_unchecked(&g, out)
}

/// Perpendicular gradient `(-d_y psi, d_x psi)`, divergence free by construction.
pub fn perp_gradient(psi: &Field2D) -> VectorField2D {
    VectorField2D { x: partial_y(psi).scale(-1.0), y: partial_x(psi) }
}

pub fn laplacian(f: &Field2D) -> Field2D {
    let g = f.grid().clone();
    f.multiply_symbol(|i| -g.k2_op(i))
}

pub fn laplacian_vec(v: &VectorField2D) -> VectorField2D {
    v.map(laplacian)
}

/// Division by `-|k|^2` on nonzero modes; the output has zero mean.
pub fn inverse_laplacian(f: &Field2D) -> Field2D {
    let g = f.grid().clone();
    f.multiply_symbol(|i| {
        let k2 = g.k2_op(i);
        if k2 > 0.0 {
            -1.0 / k2
        } else {
            0.0
        }
    })
}

/// Leray projector `Id - grad Lap^{-1} div`. Modes with `k~ = 0` (the mean
/// and pure Nyquist modes) pass through unchanged.
pub fn leray_project(v: &VectorField2D) -> VectorField2D {
    project(v, true)
}

/// Complement of the Leray projector, `grad Lap^{-1} div`; the gradient part
/// of `v`. Modes with `k~ = 0` are removed.
pub fn gradient_part(v: &VectorField2D) -> VectorField2D {
    project(v, false)
}

fn project(v: &VectorField2D, keep_solenoidal: bool) -> VectorField2D {
    let g = v.grid().clone();
    let a = v.x.spectral();
    let b = v.y.spectral();
    let len = a.len();
    let mut ox = Vec::with_capacity(len);
    let mut oy = Vec::with_capacity(len);
    for i in 0..len {
        let (ix, iy) = g.mode_of(i);
        let (kx, ky) = (g.dkx(ix), g.dky(iy));
        let k2 = kx * kx + ky * ky;
        let (cx, cy) = (a[i], b[i]);
        if k2 == 0.0 {
            if keep_solenoidal {
                ox.push(cx);
                oy.push(cy);
            } else {
                ox.push(Complex64::new(0.0, 0.0));
                oy.push(Complex64::new(0.0, 0.0));
            }
            continue;
        }
        let dot = (kx * cx + ky * cy) / k2;
        let (gx, gy) = (dot * kx, dot * ky);
        if keep_solenoidal {
            ox.push(cx - gx);
            oy.push(cy - gy);
        } else {
            ox.push(gx);
            oy.push(gy);
        }
    }
    VectorField2D { x: Field2D::from_spectral_unchecked(&g, ox), y: Field2D::from_spectral_unchecked(&g, oy) }
}

/// `v . grad f`, 2/3 truncated.
pub fn advect(v: &VectorField2D, f: &Field2D) -> Result<Field2D> {
    let grad = gradient(f);
    v.x.product(&grad.x)?.add(&v.y.product(&grad.y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field2d::Grid2D;
    use std::f64::consts::PI;

    fn grid() -> Grid2D {
        Grid2D::new(32, 2.0 * PI).unwrap()
    }

    fn max_diff(a: &Field2D, b: &Field2D) -> f64 {
        a.physical().iter().zip(b.physical().iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn derivative_of_cosine() {
        let g = grid();
        let f = Field2D::from_fn(&g, |x, _| x.cos());
        let grad = gradient(&f);
        let expect = Field2D::from_fn(&g, |x, _| -x.sin());
        assert!(max_diff(&grad.x, &expect) < 1e-13);
        assert!(grad.y.max_abs() < 1e-14);
    }

    #[test]
    fn constant_has_zero_gradient() {
        let g = grid();
        let grad = gradient(&Field2D::constant(&g, 4.0));
        assert!(grad.max_abs() < 1e-14);
    }

    #[test]
    fn laplacian_of_mode() {
        let g = grid();
        let f = Field2D::from_fn(&g, |x, y| (3.0 * x + 2.0 * y).sin());
        let lap = laplacian(&f);
        assert!(max_diff(&lap, &f.scale(-13.0)) < 1e-11);
    }

    #[test]
    fn stream_function_field_is_solenoidal() {
        let g = grid();
        let psi = Field2D::from_fn(&g, |x, y| (x + 2.0 * y).sin() * (3.0 * x).cos());
        let v = perp_gradient(&psi);
        assert!(divergence(&v).norm_l2() < 1e-12 * v.norm_l2());
    }

    #[test]
    fn inverse_laplacian_inverts_on_zero_mean() {
        let g = grid();
        let f = Field2D::from_fn(&g, |x, y| (2.0 * x).sin() + (x - 3.0 * y).cos() + 0.7);
        let back = laplacian(&inverse_laplacian(&f));
        assert!(max_diff(&back, &f.remove_mean()) < 1e-12);
        assert!(inverse_laplacian(&f).mean().abs() < 1e-16);
    }

    #[test]
    fn gradient_part_complements_leray() {
        let g = grid();
        let v = VectorField2D::new(
            Field2D::from_fn(&g, |x, y| (x + y).sin()),
            Field2D::from_fn(&g, |x, y| (2.0 * x - y).cos()),
        )
        .unwrap();
        let sum = leray_project(&v).add(&gradient_part(&v)).unwrap();
        assert!(sum.sub(&v).unwrap().norm_l2() < 1e-13 * v.norm_l2());
        assert!(curl(&gradient_part(&v)).norm_l2() < 1e-12 * v.norm_l2());
    }
}

//! Bony decomposition `ab = T_a b + T_b a + R(a, b)`.
//!
//! Blocks come from the homogeneous [`LPFamily`], so the operators act on the
//! mean-free parts of their arguments. Products are formed pointwise on the
//! grid; that is alias-free only when both inputs lie strictly inside the
//! quarter band `|k_i| < n/4`, which the strict entry points enforce.

use crate::dyadic::{delta_j, LPFamily, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::field2d::Field2D;

fn check_band(f: &Field2D, name: &str) -> Result<()> {
    let g = f.grid().clone();
    let leak = f.relative_leakage(|i| !g.within_quarter_band(i));
    if leak > SUPPORT_TOL {
        return Err(Error::SupportViolation(format!(
            "{name} is not band-limited to n/4 (relative leakage {leak:.3e})"
        )));
    }
    Ok(())
}

fn blocks(f: &Field2D, fam: &LPFamily) -> Result<Vec<Vec<f64>>> {
    fam.indices().map(|j| Ok(delta_j(f, j, fam)?.into_physical_vec())).collect()
}

fn finish(fam: &LPFamily, acc: Vec<f64>, truncate: bool) -> Result<Field2D> {
    let f = Field2D::from_physical(fam.grid(), acc)?.to_spectral();
    Ok(if truncate { f.dealias() } else { f })
}

fn para_inner(a: &Field2D, b: &Field2D, fam: &LPFamily, truncate: bool) -> Result<Field2D> {
    a.check_grid(b)?;
    let ba = blocks(a, fam)?;
    let bb = blocks(b, fam)?;
    let len = fam.grid().physical_len();
    let mut low = vec![0.0; len];
    let mut acc = vec![0.0; len];
    // S_{j-1} a = sum_{j' <= j-2} Delta_{j'} a
    for k in 0..ba.len() {
        if k >= 2 {
            for (l, x) in low.iter_mut().zip(&ba[k - 2]) {
                *l += x;
            }
        }
        if k >= 2 {
            for ((o, l), y) in acc.iter_mut().zip(&low).zip(&bb[k]) {
                *o += l * y;
            }
        }
    }
    finish(fam, acc, truncate)
}

fn remainder_inner(a: &Field2D, b: &Field2D, fam: &LPFamily, truncate: bool) -> Result<Field2D> {
    a.check_grid(b)?;
    let ba = blocks(a, fam)?;
    let bb = blocks(b, fam)?;
    let len = fam.grid().physical_len();
    let mut acc = vec![0.0; len];
    let nb = ba.len();
    for k in 0..nb {
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(nb - 1);
        for i in 0..len {
            let mut wide = 0.0;
            for bk in &bb[lo..=hi] {
                wide += bk[i];
            }
            acc[i] += ba[k][i] * wide;
        }
    }
    finish(fam, acc, truncate)
}

/// Paraproduct `T_a b = sum_j S_{j-1} a Delta_j b`.
pub fn para_t(a: &Field2D, b: &Field2D, fam: &LPFamily) -> Result<Field2D> {
    check_band(a, "a")?;
    check_band(b, "b")?;
    para_inner(a, b, fam, false)
}

/// Remainder `R(a, b) = sum_j Delta_j a (Delta_{j-1} + Delta_j + Delta_{j+1}) b`.
pub fn remainder_r(a: &Field2D, b: &Field2D, fam: &LPFamily) -> Result<Field2D> {
    check_band(a, "a")?;
    check_band(b, "b")?;
    remainder_inner(a, b, fam, false)
}

/// [`para_t`] for inputs that are not quarter-band limited: every product is
/// 2/3 truncated and the reconstruction identity no longer holds exactly.
pub fn para_t_truncated(a: &Field2D, b: &Field2D, fam: &LPFamily) -> Result<Field2D> {
    para_inner(a, b, fam, true)
}

pub fn remainder_r_truncated(a: &Field2D, b: &Field2D, fam: &LPFamily) -> Result<Field2D> {
    remainder_inner(a, b, fam, true)
}

/// Relative reconstruction residual
/// `||ab - T_a b - T_b a - R(a,b)||_{L^2} / ||ab||_{L^2}` for the mean-free
/// parts of `a` and `b`.
pub fn bony_reconstruct(a: &Field2D, b: &Field2D, fam: &LPFamily) -> Result<f64> {
    check_band(a, "a")?;
    check_band(b, "b")?;
    let (a0, b0) = (a.remove_mean(), b.remove_mean());
    let ab = a0.product_exact(&b0)?;
    let denom = ab.norm_l2();
    if denom == 0.0 {
        return Err(Error::Degenerate("a * b vanishes identically".into()));
    }
    let parts = para_inner(&a0, &b0, fam, false)?
        .add(&para_inner(&b0, &a0, fam, false)?)?
        .add(&remainder_inner(&a0, &b0, fam, false)?)?;
    Ok(ab.sub(&parts)?.norm_l2() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{build_family, TransitionProfile};
    use crate::field2d::Grid2D;
    use std::f64::consts::PI;

    #[test]
    fn zero_low_factor() {
        let g = Grid2D::new(32, 2.0 * PI).unwrap();
        let fam = build_family(&g, TransitionProfile::default()).unwrap();
        let b = Field2D::from_fn(&g, |x, y| (3.0 * x + y).cos());
        assert!(para_t(&Field2D::zeros(&g), &b, &fam).unwrap().is_zero());
    }

    #[test]
    fn aliasing_inputs_rejected() {
        let g = Grid2D::new(32, 2.0 * PI).unwrap();
        let fam = build_family(&g, TransitionProfile::default()).unwrap();
        let a = Field2D::from_fn(&g, |x, _| (10.0 * x).cos());
        let b = Field2D::from_fn(&g, |x, _| x.cos());
        assert!(matches!(para_t(&a, &b, &fam), Err(Error::SupportViolation(_))));
        assert!(para_t_truncated(&a, &b, &fam).is_ok());
        assert!(bony_reconstruct(&a, &b, &fam).is_err());
    }
}

use super::field::{Field2D, VectorField2D};
use crate::besov::{besov_norm, BesovSpec};
use crate::dyadic::LPFamily;
use crate::error::{invalid, Result};

/// Fields the heat semigroup `e^{t Lap}` acts on.
pub trait HeatFlow: Sized {
    /// Multiplier `e^{-t |k|^2}` with no check on the sign of `t`.
    fn heat_factor(&self, t: f64) -> Self;
}

impl HeatFlow for Field2D {
    fn heat_factor(&self, t: f64) -> Self {
        if t == 0.0 {
            return self.clone();
        }
        let g = self.grid().clone();
        self.multiply_symbol(|i| (-t * g.k2_op(i)).exp())
    }
}

impl HeatFlow for VectorField2D {
    fn heat_factor(&self, t: f64) -> Self {
        self.map(|c| c.heat_factor(t))
    }
}

pub fn heat_semigroup<T: HeatFlow>(f: &T, t: f64) -> Result<T> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("heat semigroup needs t >= 0, got {t}")));
    }
    Ok(f.heat_factor(t))
}

/// Exponents for the smoothing estimate
/// `||e^{t Lap} f||_{B^{s1}_{p1,1}} <~ t^{-e} ||f||_{B^{s2}_{p2,inf}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatDecayParams {
    pub s1: f64,
    pub s2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl HeatDecayParams {
    /// `(s1 - s2)/2 + 1/p2 - 1/p1`.
    pub fn exponent(&self) -> f64 {
        (self.s1 - self.s2) / 2.0 + 1.0 / self.p2 - 1.0 / self.p1
    }

    fn validate(&self) -> Result<()> {
        if !(self.p1 >= self.p2 && self.p2 >= 1.0) {
            return Err(invalid("p1", format!("need p1 >= p2 >= 1, got p1 = {}, p2 = {}", self.p1, self.p2)));
        }
        let e = self.exponent();
        if !(e > 0.0) {
            return Err(invalid("s1", format!("smoothing exponent must be positive, got {e}")));
        }
        Ok(())
    }
}

/// `||e^{t Lap} f||_{B^{s1}_{p1,1}} t^{e} / ||f||_{B^{s2}_{p2,inf}}`, bounded
/// uniformly in `t` for data in the source space.
pub fn heat_decay_ratio(f: &Field2D, t: f64, params: HeatDecayParams, fam: &LPFamily) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(invalid("t", format!("need t > 0, got {t}")));
    }
    let denom = besov_norm(f, BesovSpec::new(params.s2, params.p2, f64::INFINITY)?, fam)?;
    if denom == 0.0 {
        return Err(crate::Error::Degenerate("source norm is zero".into()));
    }
    let num = besov_norm(&f.heat_factor(t), BesovSpec::new(params.s1, params.p1, 1.0)?, fam)?;
    Ok(num * t.powf(params.exponent()) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field2d::Grid2D;
    use std::f64::consts::PI;

    #[test]
    fn identity_at_zero_and_negative_rejected() {
        let g = Grid2D::new(16, 2.0 * PI).unwrap();
        let f = Field2D::from_fn(&g, |x, y| (x + y).sin());
        let same = heat_semigroup(&f, 0.0).unwrap();
        assert!(same.sub(&f).unwrap().norm_l2() < 1e-15);
        assert!(heat_semigroup(&f, -1e-3).is_err());
    }

    #[test]
    fn unit_mode_decays_by_e() {
        let g = Grid2D::new(16, 2.0 * PI).unwrap();
        let f = Field2D::from_fn(&g, |x, _| x.cos());
        let h = heat_semigroup(&f, 1.0).unwrap();
        let expect = f.scale((-1.0f64).exp());
        assert!(h.sub(&expect).unwrap().norm_l2() < 1e-14);
    }

    #[test]
    fn degenerate_exponent_rejected() {
        let p = HeatDecayParams { s1: 0.0, s2: 0.0, p1: 2.0, p2: 2.0 };
        assert!(p.validate().is_err());
        let p = HeatDecayParams { s1: 0.0, s2: 0.0, p1: 2.0, p2: 4.0 };
        assert!(p.validate().is_err());
    }
}

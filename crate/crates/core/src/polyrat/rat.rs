use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::roots::roots;
use crate::error::{LabError, Result};

/// Rational function `num / den`. Serializes as `{"num": [...], "den": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RatRepr")]
pub struct Rat {
    pub num: Poly,
    pub den: Poly,
}

#[derive(Deserialize)]
struct RatRepr {
    num: Poly,
    den: Poly,
}

impl TryFrom<RatRepr> for Rat {
    type Error = LabError;
    fn try_from(r: RatRepr) -> Result<Self> {
        Rat::new(r.num, r.den)
    }
}

impl From<Poly> for Rat {
    fn from(p: Poly) -> Self {
        Rat {
            num: p,
            den: Poly::one(),
        }
    }
}

impl Rat {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(LabError::InvalidInput("zero denominator".into()));
        }
        Ok(Rat { num, den })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let d = self.den.eval(z);
        if d.norm() <= 1e-15 * self.den.eval_scale(z) {
            return Err(LabError::PoleAt { z });
        }
        Ok(self.num.eval(z) / d)
    }

    pub fn derivative(&self) -> Rat {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Rat {
            num,
            den: &self.den * &self.den,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Checks that the denominator has no roots in the closed unit disc.
    pub fn check_holomorphic_closed_disc(&self) -> Result<()> {
        for r in roots(&self.den)? {
            if r.value.norm() <= 1.0 + 1e-12 {
                return Err(LabError::NotHolomorphic(format!(
                    "denominator root {} in the closed disc",
                    r.value
                )));
            }
        }
        Ok(())
    }

    /// Max modulus on a uniform grid of `grid_size` points of `|z| = radius`.
    pub fn sup_circle_radius(&self, radius: f64, grid_size: usize) -> Result<f64> {
        let n = grid_size.max(1);
        let mut sup: f64 = 0.0;
        for j in 0..n {
            let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64);
            let v = self
                .eval(z)
                .map_err(|_| LabError::PoleOnCircle { z })?;
            sup = sup.max(v.norm());
        }
        Ok(sup)
    }

    pub fn sup_circle(&self, grid_size: usize) -> Result<f64> {
        self.sup_circle_radius(1.0, grid_size)
    }

    pub fn scale(&self, s: Complex64) -> Rat {
        Rat {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    /// Bound for `|f'|` on the closed disc: exact coefficient bound for
    /// polynomials, sampled circle maximum (max principle) otherwise.
    pub fn derivative_bound(&self) -> Result<f64> {
        if self.is_polynomial() {
            return Ok(self.num.derivative_bound() / self.den.coeff(0).norm());
        }
        Ok(self.derivative().sup_circle(4096)? * 1.01)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_pole() {
        let r = Rat::new(Poly::from_real(&[1.0]), Poly::from_real(&[1.0, -1.0])).unwrap();
        assert!((r.eval(Complex64::new(0.5, 0.0)).unwrap().re - 2.0).abs() < 1e-15);
        assert!(matches!(
            r.eval(Complex64::new(1.0, 0.0)),
            Err(LabError::PoleAt { .. })
        ));
        assert!(matches!(r.sup_circle(8), Err(LabError::PoleOnCircle { .. })));
        assert!(r.check_holomorphic_closed_disc().is_err());
    }

    #[test]
    fn serde_shape() {
        let r = Rat::new(Poly::from_real(&[0.5, 0.5]), Poly::one()).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"num":[[0.5,0.0],[0.5,0.0]],"den":[[1.0,0.0]]}"#);
        let back: Rat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<Rat>(r#"{"num":[[1,0]],"den":[]}"#).is_err());
    }
}

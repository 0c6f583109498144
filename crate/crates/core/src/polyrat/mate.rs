use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rat::Rat;
use super::trig::{spectral_factor, TrigPoly};
use crate::error::{LabError, Result};

/// Grid used for the ball check and the roundtrip `|a|^2 + |b|^2 = 1`.
pub const MATE_GRID: usize = 4096;
/// Roots of the mate within this distance of the circle are boundary zeros.
pub const BOUNDARY_TOL: f64 = 1e-6;
const ROUNDTRIP_TOL: f64 = 1e-9;
const INNER_TOL: f64 = 1e-10;

/// Taylor coefficients at 0 of `b / a`, `length` of them.
pub fn series_div(b: &Rat, a: &Rat, length: usize) -> Result<Vec<Complex64>> {
    let num = &b.num * &a.den;
    let den = &b.den * &a.num;
    poly_series_div(&num, &den, length)
}

/// Taylor coefficients of `num / den` by long division of power series.
pub fn poly_series_div(num: &Poly, den: &Poly, length: usize) -> Result<Vec<Complex64>> {
    let d0 = den.coeff(0);
    if d0.norm() <= 1e-15 * den.max_abs_coeff().max(f64::MIN_POSITIVE) {
        return Err(LabError::ZeroConstantTerm);
    }
    let d = den.coeffs();
    let mut c = Vec::with_capacity(length);
    for j in 0..length {
        let mut s = num.coeff(j);
        for i in 1..d.len().min(j + 1) {
            s -= d[i] * c[j - i];
        }
        c.push(s / d0);
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryZero {
    pub zeta: Complex64,
    pub multiplicity: usize,
}

/// A rational `b` in the closed unit ball together with its outer mate `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalMate {
    pub b: Rat,
    pub a: Rat,
    pub boundary_zeros: Vec<BoundaryZero>,
    #[serde(rename = "N")]
    pub n: usize,
    pub c: Vec<Complex64>,
    pub truncation_length: usize,
    /// Max over the check grid of `| |a|^2 + |b|^2 - 1 |`.
    pub roundtrip_residual: f64,
    pub multiplicity_tolerance: f64,
}

impl RationalMate {
    /// `c_j`, computing further coefficients on the fly past the stored ones.
    pub fn c_upto(&self, len: usize) -> Result<Vec<Complex64>> {
        if len <= self.c.len() {
            return Ok(self.c[..len].to_vec());
        }
        series_div(&self.b, &self.a, len)
    }

    /// Returns a copy whose stored series has at least `len` terms.
    pub fn with_truncation(&self, len: usize) -> Result<RationalMate> {
        let mut m = self.clone();
        if len > m.c.len() {
            m.c = series_div(&m.b, &m.a, len)?;
            m.truncation_length = len;
        }
        Ok(m)
    }

    /// Partial sums `sum_{j<=n} |c_j|^2` for `n = 0..len-1`.
    pub fn c_partial_sums(&self) -> Vec<f64> {
        self.c
            .iter()
            .scan(0.0, |acc, c| {
                *acc += c.norm_sqr();
                Some(*acc)
            })
            .collect()
    }
}

/// Default series length for downstream use up to monomial index `n_max`.
pub fn default_truncation(n_max: usize) -> usize {
    4 * n_max + 16
}

/// Pythagorean mate of `b`: the outer rational `a` with `a(0) > 0` and
/// `|a|^2 + |b|^2 = 1` on the circle.
pub fn mate(b: &Rat, truncation_length: usize) -> Result<RationalMate> {
    b.check_holomorphic_closed_disc()?;
    let values: Vec<Complex64> = (0..MATE_GRID)
        .map(|j| {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / MATE_GRID as f64);
            b.eval(z)
        })
        .collect::<Result<_>>()?;
    let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if sup > 1.0 + ROUNDTRIP_TOL {
        return Err(LabError::NotInBall { sup });
    }
    let gap = values
        .iter()
        .map(|v| 1.0 - v.norm_sqr())
        .fold(0.0, f64::max);
    if gap <= INNER_TOL {
        return Err(LabError::InnerFunction);
    }

    // 1 - |p/q|^2 = (|q|^2 - |p|^2) / |q|^2
    let t = TrigPoly::abs_sq(&b.den).sub(&TrigPoly::abs_sq(&b.num));
    let sf = spectral_factor(&t)?;
    let q0 = b.den.coeff(0);
    let r0 = sf.factor.coeff(0);
    let ratio = r0 / q0;
    if ratio.norm() == 0.0 {
        return Err(LabError::FactorizationFailure("mate vanishes at 0".into()));
    }
    let num = sf.factor.scale(ratio.conj() / ratio.norm());
    let a = Rat::new(num, b.den.clone())?;

    let mut boundary_zeros: Vec<BoundaryZero> = sf
        .roots
        .iter()
        .filter(|r| (r.value.norm() - 1.0).abs() <= BOUNDARY_TOL)
        .map(|r| BoundaryZero {
            zeta: r.value / r.value.norm(),
            multiplicity: r.multiplicity,
        })
        .collect();
    boundary_zeros.sort_by(|x, y| x.zeta.arg().partial_cmp(&y.zeta.arg()).unwrap());
    let n = boundary_zeros.iter().map(|z| z.multiplicity).sum();

    let roundtrip_residual = (0..MATE_GRID)
        .map(|j| {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / MATE_GRID as f64);
            let av = a.eval(z)?;
            Ok((av.norm_sqr() + values[j].norm_sqr() - 1.0).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if roundtrip_residual > ROUNDTRIP_TOL {
        return Err(LabError::FactorizationFailure(format!(
            "|a|^2 + |b|^2 - 1 reaches {roundtrip_residual:e} on the circle"
        )));
    }
    let c = series_div(b, &a, truncation_length)?;
    Ok(RationalMate {
        b: b.clone(),
        a,
        boundary_zeros,
        n,
        c,
        truncation_length,
        roundtrip_residual,
        multiplicity_tolerance: BOUNDARY_TOL,
    })
}

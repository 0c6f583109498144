//! Real trigonometric polynomials on the circle and their Fejér–Riesz
//! factorization `t = |q|^2` with `q` free of zeros in the open disc.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::roots::{roots, Root};
use crate::error::{LabError, Result};

/// Grid used to test nonnegativity and to fix the modulus of the factor.
const CHECK_GRID: usize = 4096;
/// Relative tolerance for the pairing `w <-> 1/conj(w)`.
const PAIRING_TOL: f64 = 1e-8;
/// Roots within this distance of the circle are treated as unimodular.
const ON_CIRCLE_TOL: f64 = 1e-6;

/// `t(theta) = sum_{k=-n}^{n} c_k e^{i k theta}` with `c_{-k} = conj(c_k)`.
/// `coeffs[k + n]` holds `c_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    /// Builds from Laurent coefficients `c_{-n}..c_n`; symmetry is checked to
    /// `1e-12` relative and then enforced exactly.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(LabError::InvalidInput(
                "trigonometric polynomial needs an odd number of coefficients".into(),
            ));
        }
        let n = coeffs.len() / 2;
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut sym = coeffs.clone();
        for k in 0..=n {
            let (lo, hi) = (coeffs[n - k], coeffs[n + k]);
            if (lo - hi.conj()).norm() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(LabError::InvalidInput(format!(
                    "coefficients of order ±{k} are not conjugate"
                )));
            }
            let avg = (hi + lo.conj()) * 0.5;
            sym[n + k] = avg;
            sym[n - k] = avg.conj();
        }
        sym[n].im = 0.0;
        Ok(TrigPoly { coeffs: sym })
    }

    /// `|p|^2` on the circle.
    pub fn abs_sq(p: &Poly) -> Self {
        let n = p.len().saturating_sub(1);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        let a = p.coeffs();
        for k in 0..=n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..a.len().saturating_sub(k) {
                s += a[j + k] * a[j].conj();
            }
            coeffs[n + k] = s;
            coeffs[n - k] = s.conj();
        }
        coeffs[n].im = 0.0;
        TrigPoly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly {
            coeffs: vec![Complex64::new(c, 0.0)],
        }
    }

    pub fn half_degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient `c_k`, zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.half_degree() as i64;
        if k.abs() > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let n = self.half_degree();
        let mut s = self.coeffs[n].re;
        for k in 1..=n {
            s += 2.0 * (self.coeffs[n + k] * Complex64::from_polar(1.0, k as f64 * theta)).re;
        }
        s
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        let n = self.half_degree().max(other.half_degree());
        let coeffs = (-(n as i64)..=n as i64)
            .map(|k| self.coeff(k) - other.coeff(k))
            .collect();
        TrigPoly { coeffs }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops outer orders whose coefficients are below `rel_tol * max`.
    fn trimmed(&self, rel_tol: f64) -> TrigPoly {
        let max = self.max_abs_coeff();
        let mut n = self.half_degree();
        while n > 0 && self.coeffs[self.half_degree() + n].norm() <= rel_tol * max {
            n -= 1;
        }
        let mid = self.half_degree();
        TrigPoly {
            coeffs: self.coeffs[mid - n..=mid + n].to_vec(),
        }
    }

    /// Values on the uniform grid `theta_j = 2 pi j / m`.
    pub fn grid_values(&self, m: usize) -> Vec<f64> {
        (0..m)
            .map(|j| self.eval(2.0 * PI * j as f64 / m as f64))
            .collect()
    }
}

/// Result of the spectral factorization with the root bookkeeping that the
/// mate computation needs.
#[derive(Clone, Debug)]
pub struct SpectralFactor {
    pub factor: Poly,
    /// Roots of `factor` (outside or on the circle) with multiplicities.
    pub roots: Vec<Root>,
    /// Max over the check grid of `| |q|^2 - t |`.
    pub residual: f64,
}

/// Fejér–Riesz factorization: `q` with `|q|^2 = t` on the circle, no roots in
/// the open disc, `q(0)` real and nonnegative.
pub fn fejer_riesz(t: &TrigPoly) -> Result<Poly> {
    Ok(spectral_factor(t)?.factor)
}

pub fn spectral_factor(t: &TrigPoly) -> Result<SpectralFactor> {
    let scale = t.max_abs_coeff();
    if scale == 0.0 {
        return Err(LabError::InvalidInput(
            "trigonometric polynomial vanishes identically".into(),
        ));
    }
    let t = t.trimmed(1e-14);
    let grid = CHECK_GRID.max(8 * (2 * t.half_degree() + 1));
    let values = t.grid_values(grid);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * scale {
        return Err(LabError::Negativity { min });
    }
    let n = t.half_degree();
    if n == 0 {
        let c = t.coeffs[0].re;
        return Ok(SpectralFactor {
            factor: Poly::constant(Complex64::new(c.max(0.0).sqrt(), 0.0)),
            roots: Vec::new(),
            residual: 0.0,
        });
    }

    // z^n t(z) is the degree-2n polynomial with coefficients c_{-n}..c_n
    let laurent = Poly::new(t.coeffs.clone());
    let all = roots(&laurent)?;

    let mut selected: Vec<Root> = Vec::new();
    let mut outside: Vec<Root> = Vec::new();
    let mut inside: Vec<Root> = Vec::new();
    for r in all {
        let modulus = r.value.norm();
        if (modulus - 1.0).abs() <= ON_CIRCLE_TOL {
            if r.multiplicity % 2 != 0 {
                return Err(LabError::FactorizationFailure(format!(
                    "unimodular root {} has odd multiplicity {}",
                    r.value, r.multiplicity
                )));
            }
            selected.push(Root {
                value: r.value / modulus,
                multiplicity: r.multiplicity / 2,
            });
        } else if modulus > 1.0 {
            outside.push(r);
        } else {
            inside.push(r);
        }
    }
    // every outside root must be mirrored by an inside root 1/conj(w)
    let mut used = vec![false; inside.len()];
    for r in &outside {
        let mirror = Complex64::new(1.0, 0.0) / r.value.conj();
        let partner = inside.iter().enumerate().position(|(i, s)| {
            !used[i]
                && s.multiplicity == r.multiplicity
                && (s.value - mirror).norm() <= PAIRING_TOL * mirror.norm().max(1.0) * 1e3
        });
        match partner {
            Some(i) => used[i] = true,
            None => {
                return Err(LabError::FactorizationFailure(format!(
                    "no mirror root for {}",
                    r.value
                )))
            }
        }
        let mismatch = inside
            .iter()
            .zip(&used)
            .filter(|(_, u)| **u)
            .map(|(s, _)| (s.value - mirror).norm())
            .fold(f64::INFINITY, f64::min);
        if mismatch > PAIRING_TOL * mirror.norm().max(1.0) * 1e3 {
            return Err(LabError::FactorizationFailure(format!(
                "root pairing residual {mismatch:e} for {}",
                r.value
            )));
        }
        selected.push(*r);
    }
    if used.iter().any(|u| !u) {
        return Err(LabError::FactorizationFailure(
            "unpaired root inside the disc".into(),
        ));
    }
    let count: usize = selected.iter().map(|r| r.multiplicity).sum();
    if count != n {
        return Err(LabError::FactorizationFailure(format!(
            "selected {count} roots, expected {n}"
        )));
    }

    let flat: Vec<Complex64> = selected
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
        .collect();
    let monic = Poly::from_roots(&flat, Complex64::new(1.0, 0.0));
    // |c|^2 by least squares over the grid
    let sq: Vec<f64> = monic
        .circle_values(1.0, grid)
        .into_iter()
        .map(|v| v.norm_sqr())
        .collect();
    let num: f64 = values.iter().zip(&sq).map(|(t, s)| t * s).sum();
    let den: f64 = sq.iter().map(|s| s * s).sum();
    let modulus = (num / den).sqrt();
    let q0 = monic.coeff(0) * modulus;
    if q0.norm() == 0.0 {
        return Err(LabError::FactorizationFailure("factor vanishes at 0".into()));
    }
    let factor = monic.scale(q0.conj() / q0.norm() * modulus);

    let residual = factor
        .circle_values(1.0, grid)
        .iter()
        .zip(&values)
        .map(|(q, t)| (q.norm_sqr() - t).abs())
        .fold(0.0, f64::max);
    if residual > 1e-6 * scale {
        return Err(LabError::FactorizationFailure(format!(
            "|q|^2 misses t by {residual:e}"
        )));
    }
    Ok(SpectralFactor {
        factor,
        roots: selected,
        residual,
    })
}

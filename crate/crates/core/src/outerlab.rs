//! Outer functions from boundary moduli, zero sets on the circle, and the
//! boundary behaviour of rational symbols.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::polyrat::{roots, BoundaryZero, Poly, Rat};

/// Default number of circle samples for the Herglotz integral.
pub const DEFAULT_HERGLOTZ_GRID: usize = 1 << 22;
/// Evaluation radius beyond which the trapezoid rule is not trusted.
pub const ACCURACY_RADIUS: f64 = 0.999;
const BOUNDARY_ZERO_TOL: f64 = 1e-8;

/// Samples of `log φ` on the uniform grid `θ_j = 2π (j + 1/2) / N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryModulus {
    log_phi: Vec<f64>,
}

impl BoundaryModulus {
    pub fn new(log_phi: Vec<f64>) -> Result<Self> {
        if log_phi.is_empty() || !log_phi.len().is_power_of_two() {
            return Err(LabError::InvalidInput(format!(
                "grid size {} is not a power of two",
                log_phi.len()
            )));
        }
        if let Some(j) = log_phi.iter().position(|v| !v.is_finite()) {
            return Err(LabError::InvalidInput(format!("log phi is not finite at sample {j}")));
        }
        Ok(BoundaryModulus { log_phi })
    }

    pub fn theta(j: usize, n: usize) -> f64 {
        2.0 * PI * (j as f64 + 0.5) / n as f64
    }

    /// Samples `φ(e^{iθ})` given as a function of `θ`.
    pub fn from_fn<F: Fn(f64) -> f64>(phi: F, grid_size: usize) -> Result<Self> {
        BoundaryModulus::new((0..grid_size).map(|j| phi(Self::theta(j, grid_size)).ln()).collect())
    }

    /// The modulus `|f|` of a polynomial on the circle.
    pub fn from_poly(f: &Poly, grid_size: usize) -> Result<Self> {
        BoundaryModulus::from_fn(|t| f.eval(Complex64::from_polar(1.0, t)).norm(), grid_size)
    }

    /// Reads `(θ, φ)` rows. The angles must form the offset uniform grid.
    pub fn from_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| LabError::InvalidInput(e.to_string()))?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| LabError::InvalidInput("expected two columns theta,phi".into()))?
                    .parse::<f64>()
                    .map_err(|e| LabError::InvalidInput(e.to_string()))
            };
            match (parse(0), parse(1)) {
                (Ok(t), Ok(p)) => rows.push((t, p)),
                // a non-numeric first row is a header
                (Err(_), _) if rows.is_empty() => continue,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        }
        let n = rows.len();
        for (j, (t, p)) in rows.iter().enumerate() {
            if (t - Self::theta(j, n)).abs() > 1e-9 {
                return Err(LabError::InvalidInput(format!(
                    "sample {j}: theta = {t} is not 2 pi (j + 1/2) / {n}"
                )));
            }
            if !(*p > 0.0) {
                return Err(LabError::InvalidInput(format!("sample {j}: phi = {p} must be positive")));
            }
        }
        BoundaryModulus::new(rows.iter().map(|(_, p)| p.ln()).collect())
    }

    pub fn grid_size(&self) -> usize {
        self.log_phi.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OuterValue {
    pub value: Complex64,
    pub warning: Option<String>,
}

/// Beurling's outer function `exp(∫ (ξ+z)/(ξ-z) log φ(ξ) dm(ξ))` at `z`.
pub fn outer_from_modulus(m: &BoundaryModulus, z: Complex64) -> Result<OuterValue> {
    if z.norm() >= 1.0 {
        return Err(LabError::InvalidInput(format!("outer function needs |z| < 1, got {z}")));
    }
    let n = m.grid_size();
    let mut s = Complex64::new(0.0, 0.0);
    for (j, lp) in m.log_phi.iter().enumerate() {
        let xi = Complex64::from_polar(1.0, BoundaryModulus::theta(j, n));
        s += (xi + z) / (xi - z) * lp;
    }
    let warning = (z.norm() > ACCURACY_RADIUS)
        .then(|| format!("|z| = {} exceeds the accuracy radius {ACCURACY_RADIUS}", z.norm()));
    Ok(OuterValue {
        value: (s / n as f64).exp(),
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OuterCheck {
    pub outer: bool,
    pub min_root_modulus: Option<f64>,
    /// `log|f(0)| - mean of log|f|` on the circle, when no root is close
    /// to the circle.
    pub mean_value_gap: Option<f64>,
}

/// Polynomial outerness: no roots in the open disc, with the Jensen
/// mean-value identity as a cross-check.
pub fn outer_check(f: &Poly) -> Result<OuterCheck> {
    if f.is_zero() {
        return Err(LabError::InvalidInput("the zero polynomial is not outer".into()));
    }
    let rts = roots(f)?;
    let min_root_modulus = rts.iter().map(|r| r.value.norm()).reduce(f64::min);
    let outer = min_root_modulus.is_none_or(|m| m >= 1.0 - 1e-10);
    let near_circle = rts.iter().any(|r| (r.value.norm() - 1.0).abs() < 1e-3);
    let mean_value_gap = (!near_circle).then(|| {
        let n = 4096;
        let avg = (0..n)
            .map(|j| f.eval(Complex64::from_polar(1.0, BoundaryModulus::theta(j, n))).norm().ln())
            .sum::<f64>()
            / n as f64;
        f.coeff(0).norm().ln() - avg
    });
    Ok(OuterCheck { outer, min_root_modulus, mean_value_gap })
}

pub fn is_outer(f: &Poly) -> Result<bool> {
    Ok(outer_check(f)?.outer)
}

/// Roots on the unit circle with multiplicities.
pub fn boundary_zeros(f: &Poly) -> Result<Vec<BoundaryZero>> {
    if f.is_zero() {
        return Err(LabError::InvalidInput("the zero polynomial has no isolated zeros".into()));
    }
    let mut out: Vec<BoundaryZero> = roots(f)?
        .into_iter()
        .filter(|r| (r.value.norm() - 1.0).abs() <= BOUNDARY_ZERO_TOL)
        .map(|r| BoundaryZero {
            zeta: r.value / r.value.norm(),
            multiplicity: r.multiplicity,
        })
        .collect();
    out.sort_by(|a, b| a.zeta.arg().partial_cmp(&b.zeta.arg()).unwrap());
    Ok(out)
}

/// Radii `1 - 2^{-k}` for `k = 1..=20`.
pub fn default_radii() -> Vec<f64> {
    (1..=20).map(|k| 1.0 - 0.5f64.powi(k)).collect()
}

/// `(r, (1-r) log|f(rζ)|)` along the radius ending at a boundary zero `ζ`.
pub fn shapiro_shields_decay(f: &Poly, zeta: Complex64, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    if f.is_zero() {
        return Err(LabError::InvalidInput("f must not vanish identically".into()));
    }
    if f.eval(zeta).norm() > 1e-10 * f.eval_scale(zeta) {
        return Err(LabError::Precondition(format!("f does not vanish at {zeta}")));
    }
    // f = (z - ζ)^m g keeps the relative accuracy of f(rζ) as r -> 1
    let m = roots(f)?
        .iter()
        .filter(|r| (r.value - zeta).norm() <= 1e-6)
        .map(|r| r.multiplicity)
        .sum::<usize>()
        .max(1);
    let mut g = f.clone();
    for _ in 0..m {
        g = g.synth_div(zeta).0;
    }
    Ok(radii
        .iter()
        .map(|&r| {
            let log_f = m as f64 * (1.0 - r).ln() + g.eval(zeta * r).norm().ln();
            (r, (1.0 - r) * log_f)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct E0Report {
    pub zeta: Complex64,
    pub member: bool,
    pub modulus_at_zeta: f64,
    pub derivative_modulus: f64,
}

/// Membership of `ζ` in `E_0(b)`; for rational `b` holomorphic on the closed
/// disc this is `|b(ζ)| = 1`.
pub fn e0_membership(b: &Rat, zeta: Complex64) -> Result<E0Report> {
    b.check_holomorphic_closed_disc()?;
    let sup = b.sup_circle(4096)?;
    if sup > 1.0 + 1e-9 {
        return Err(LabError::NotInBall { sup });
    }
    let modulus_at_zeta = b.eval(zeta)?.norm();
    let derivative_modulus = b.derivative().eval(zeta)?.norm();
    Ok(E0Report {
        zeta,
        member: (modulus_at_zeta - 1.0).abs() <= 1e-9,
        modulus_at_zeta,
        derivative_modulus,
    })
}

//! Growth of `||z^n||` in algebra, space and multiplier norms, multiplier
//! lower bounds from finite sections, and the power-series estimates behind
//! the resolvent bound of the shift.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::polyrat::Poly;
use crate::spaces::{
    besov_monomial_algebra_norm_pow, gram, local_dirichlet, monomial_gram_matrix, norm, Model, Space,
};

/// Witness functions for the `D(μ)` multiplier surrogate.
pub const WITNESS_SET_VERSION: &str = "F1 = {1, 1+z, 1-z}";

pub fn default_witnesses() -> Vec<Poly> {
    vec![Poly::one(), Poly::from_real(&[1.0, 1.0]), Poly::from_real(&[1.0, -1.0])]
}

/// What the `bounds` column of a [`GrowthReport`] is compared against.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthBound {
    /// `||z^n||_A^p <= 1 + n^p/(α+1)`.
    BesovAlgebra { p: f64, alpha: f64 },
    /// `sum_{j<=n} |c_j|^2 <= C n^(2N+1)`, `C` fitted on `1 <= n <= fit_upto`
    /// and checked on the remaining indices.
    MateCoefficients { n: usize, constant: f64, fit_upto: usize },
    /// `D_z(z^n f) <= 2 n^2 ||f||_2^2 + 2 D_z(f)`, minimized over atoms and
    /// witnesses.
    LocalDirichlet { witnesses: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub indices: Vec<usize>,
    /// `||z^n||` in the designated norm.
    pub values: Vec<f64>,
    /// Quantity compared with `bounds`, per index.
    pub compared: Vec<f64>,
    pub bounds: Vec<f64>,
    /// Indices where the bound is asserted.
    pub checked_from: usize,
    pub bound: GrowthBound,
    /// `min (bound - compared)` over checked indices.
    pub bound_margin: f64,
    /// Slope of `log value` against `log n` over `n >= 1`.
    pub fitted_exponent: f64,
}

impl GrowthReport {
    pub fn write_csv<W: std::io::Write>(&self, mut out: W, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "n,value,compared,bound")?;
        for i in 0..self.indices.len() {
            writeln!(
                out,
                "{},{:e},{:e},{:e}",
                self.indices[i], self.values[i], self.compared[i], self.bounds[i]
            )?;
        }
        Ok(())
    }
}

fn loglog_slope(indices: &[usize], values: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = indices
        .iter()
        .zip(values)
        .filter(|(n, v)| **n >= 1 && **v > 0.0)
        .map(|(n, v)| ((*n as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

fn margin(compared: &[f64], bounds: &[f64], from: usize) -> f64 {
    compared[from..]
        .iter()
        .zip(&bounds[from..])
        .map(|(c, b)| b - c)
        .fold(f64::INFINITY, f64::min)
}

/// `||z^n||` for `n = 0..=n_max`: the algebra norm for Dirichlet-type
/// spaces, the space norm for `H(b)`, and the multiplier surrogate
/// `max_f ||z^n f|| / ||f||` over [`default_witnesses`] for `D(μ)`.
pub fn monomial_growth(space: &Space, n_max: usize) -> Result<GrowthReport> {
    monomial_growth_with_witnesses(space, n_max, &default_witnesses())
}

pub fn monomial_growth_with_witnesses(space: &Space, n_max: usize, witnesses: &[Poly]) -> Result<GrowthReport> {
    let indices: Vec<usize> = (0..=n_max).collect();
    match &space.model {
        Model::Hardy => Err(LabError::InvalidInput(
            "monomials are isometric in the Hardy space; no growth to measure".into(),
        )),
        Model::Weighted { alpha } => Ok(besov_growth(&indices, 2.0, *alpha)),
        Model::Besov { p, alpha } => Ok(besov_growth(&indices, *p, *alpha)),
        Model::DeBrangesRovnyak(m) => {
            let c = m.c_upto(n_max + 1)?;
            let sums: Vec<f64> = c
                .iter()
                .scan(0.0, |acc, c| {
                    *acc += c.norm_sqr();
                    Some(*acc)
                })
                .collect();
            let values: Vec<f64> = sums.iter().map(|s| (1.0 + s).sqrt()).collect();
            let e = 2 * m.n as i32 + 1;
            let fit_upto = (n_max / 8).max(1).min(n_max);
            let constant = (1..=fit_upto)
                .map(|n| sums[n] / (n as f64).powi(e))
                .fold(0.0, f64::max);
            let bounds: Vec<f64> = indices.iter().map(|&n| constant * (n as f64).powi(e)).collect();
            let from = (fit_upto + 1).min(n_max);
            Ok(GrowthReport {
                fitted_exponent: loglog_slope(&indices, &values),
                bound_margin: margin(&sums, &bounds, from),
                indices,
                values,
                compared: sums,
                bounds,
                checked_from: from,
                bound: GrowthBound::MateCoefficients { n: m.n, constant, fit_upto },
            })
        }
        Model::HarmonicDirichlet(atoms) => {
            if witnesses.is_empty() || witnesses.iter().any(|f| f.is_zero()) {
                return Err(LabError::InvalidInput("witnesses must be nonzero".into()));
            }
            let wnorms: Vec<f64> = witnesses.iter().map(|f| norm(space, f)).collect::<Result<_>>()?;
            let rows: Vec<(f64, f64)> = indices
                .par_iter()
                .map(|&n| {
                    let mut value = 0.0f64;
                    let mut slack = f64::INFINITY;
                    for (f, fnorm) in witnesses.iter().zip(&wnorms) {
                        let g = f.shift(n);
                        value = value.max(norm(space, &g)? / fnorm);
                        for a in atoms.atoms() {
                            let rhs = 2.0 * (n * n) as f64 * f.l2_norm_sq() + 2.0 * local_dirichlet(f, a.location);
                            slack = slack.min(rhs - local_dirichlet(&g, a.location));
                        }
                    }
                    Ok((value, slack))
                })
                .collect::<Result<_>>()?;
            let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let compared: Vec<f64> = rows.iter().map(|r| -r.1).collect();
            let bounds = vec![0.0; indices.len()];
            Ok(GrowthReport {
                fitted_exponent: loglog_slope(&indices, &values),
                bound_margin: margin(&compared, &bounds, 0),
                indices,
                values,
                compared,
                bounds,
                checked_from: 0,
                bound: GrowthBound::LocalDirichlet { witnesses: WITNESS_SET_VERSION.into() },
            })
        }
    }
}

fn besov_growth(indices: &[usize], p: f64, alpha: f64) -> GrowthReport {
    let compared: Vec<f64> = indices.iter().map(|&n| besov_monomial_algebra_norm_pow(n, p, alpha)).collect();
    let bounds: Vec<f64> = indices.iter().map(|&n| 1.0 + (n as f64).powf(p) / (alpha + 1.0)).collect();
    let values: Vec<f64> = compared.iter().map(|v| v.powf(1.0 / p)).collect();
    GrowthReport {
        indices: indices.to_vec(),
        fitted_exponent: loglog_slope(indices, &values),
        bound_margin: margin(&compared, &bounds, 0),
        values,
        compared,
        bounds,
        checked_from: 0,
        bound: GrowthBound::BesovAlgebra { p, alpha },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierCheck {
    /// `max ||φ q|| / ||q||` over `deg q <= n_max`, a lower bound for the
    /// multiplier norm.
    pub op_norm_lower: f64,
    pub sup_norm: f64,
    pub space_norm: f64,
    pub n_max: usize,
}

/// Finite-section lower bound for the multiplier norm of `φ`, reported with
/// `sup |φ|` and `||φ||`; both are dominated by the multiplier norm.
pub fn multiplier_inequality_check(space: &Space, phi: &Poly, n_max: usize) -> Result<MultiplierCheck> {
    space.require_hilbert()?;
    let k = n_max + 1;
    let basis: Vec<Poly> = (0..k).map(|j| phi.shift(j)).collect();
    let a = gram(space, &basis)?.entries;
    let b = monomial_gram_matrix(space, k)?;
    let l = b
        .cholesky()
        .ok_or(LabError::SingularGram { condition: f64::INFINITY })?
        .unpack();
    let l_inv = l.try_inverse().ok_or(LabError::SingularGram { condition: f64::INFINITY })?;
    let m = &l_inv * a * l_inv.adjoint();
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let top = SymmetricEigen::new(m).eigenvalues.iter().fold(0.0f64, |x, v| x.max(*v));
    Ok(MultiplierCheck {
        op_norm_lower: top.max(0.0).sqrt(),
        sup_norm: phi.sup_circle(4096.max(64 * phi.len())),
        space_norm: norm(space, phi)?,
        n_max,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolventCheck {
    pub series_value: f64,
    pub bound: f64,
    /// Smallest `C` with `c_n <= C max(n, 1)^p` over the summed range.
    pub constant: f64,
    pub terms: usize,
    pub holds: bool,
}

const SERIES_TAIL: f64 = 1e-12;

/// `sum_n c_n / |λ|^(n+1)` against `C p! |λ|^(p+1) / (|λ|-1)^(p+1)`.
pub fn resolvent_bound_check<F>(c_seq: F, p: u32, lambda: Complex64) -> Result<ResolventCheck>
where
    F: Fn(usize) -> f64,
{
    let r = lambda.norm();
    if r <= 1.0 + 1e-6 {
        return Err(LabError::Divergence { modulus: r });
    }
    let x = 1.0 / r;
    let mut sum = 0.0;
    let mut constant = 0.0f64;
    let mut xn = x;
    let mut n = 0usize;
    loop {
        let c = c_seq(n);
        if !(c.is_finite() && c >= 0.0) {
            return Err(LabError::InvalidInput(format!("c_{n} = {c} is not a nonnegative number")));
        }
        let scale = (n.max(1) as f64).powi(p as i32);
        constant = constant.max(c / scale);
        sum += c * xn;
        n += 1;
        xn *= x;
        // tail of C max(n,1)^p x^(n+1) once the ratio of terms is below 1
        let ratio = x * ((n + 1) as f64 / n as f64).powi(p as i32);
        if ratio < 1.0 {
            let tail = constant * (n as f64).powi(p as i32) * xn / (1.0 - ratio);
            if tail < SERIES_TAIL {
                break;
            }
        }
        if n > 1 << 31 {
            return Err(LabError::NonConvergence { iterations: n, residual: sum });
        }
    }
    let fact: f64 = (1..=p).map(f64::from).product();
    let bound = constant * fact * r.powi(p as i32 + 1) / (r - 1.0).powi(p as i32 + 1);
    Ok(ResolventCheck {
        series_value: sum,
        bound,
        constant,
        terms: n,
        holds: sum <= bound + 1e-9,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerSum {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `sum_n n^p x^n` against `p! / (1-x)^(p+1)`.
pub fn power_sum_inequality(p: u32, x: f64) -> Result<PowerSum> {
    if !(x > 0.0 && x < 1.0) {
        return Err(LabError::InvalidInput(format!("x = {x} must lie in (0, 1)")));
    }
    let mut lhs = 0.0;
    let mut xn = 1.0;
    let mut n = 0usize;
    loop {
        lhs += (n as f64).powi(p as i32) * xn;
        n += 1;
        xn *= x;
        let ratio = x * ((n + 1) as f64 / n as f64).powi(p as i32);
        if ratio < 1.0 && (n as f64).powi(p as i32) * xn / (1.0 - ratio) < 1e-14 {
            break;
        }
    }
    let fact: f64 = (1..=p).map(f64::from).product();
    let rhs = fact / (1.0 - x).powi(p as i32 + 1);
    Ok(PowerSum { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-12) })
}

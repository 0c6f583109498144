use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CoronaInstance, DiscGrid};
use crate::error::{LabError, Result};
use crate::polyrat::Poly;
use crate::spaces::{gram, inner, monomial_gram_matrix, norm, Space};

/// Residual below which a least-squares pair counts as a corona solution.
pub const BEZOUT_ACCEPT: f64 = 1e-8;
const PINV_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BezoutSolution {
    pub degree: usize,
    pub g1: Poly,
    pub g2: Poly,
    /// `||f1 g1 + f2 g2 - 1||` in the space.
    pub residual: f64,
    /// Space norms of `g1`, `g2`.
    pub g_norms: (f64, f64),
    /// Sup norms on the circle, a lower bound for every multiplier norm.
    pub g_sup_norms: (f64, f64),
    pub accepted: bool,
}

/// Least-squares Bézout pair of degree `<= degree` with minimal
/// `||g1||^2 + ||g2||^2` among the minimizers of the residual.
pub fn bezout_ls(space: &Space, inst: &CoronaInstance, degree: usize) -> Result<BezoutSolution> {
    space.require_hilbert()?;
    if !(inst.delta > 0.0) {
        return Err(LabError::Precondition("delta must be positive".into()));
    }
    let k = degree + 1;
    let basis: Vec<Poly> = (0..k)
        .map(|j| inst.f1.shift(j))
        .chain((0..k).map(|j| inst.f2.shift(j)))
        .collect();
    // work with w = conj(x); then |Σ x_j e_j - 1|^2 = w* E w - 2 Re(w* s) + |1|^2
    let e = gram(space, &basis)?.entries;
    let size = basis.iter().map(|p| p.len()).max().unwrap_or(1);
    let m = monomial_gram_matrix(space, size)?;
    let s = DVector::from_fn(2 * k, |i, _| (0..size).map(|l| m[(l, 0)] * basis[i].coeff(l)).sum::<Complex64>());

    // the norm of (g1, g2) is w* N w with N = diag(M_k, M_k) = L L*
    let mk = monomial_gram_matrix(space, k)?;
    let mut n = DMatrix::<Complex64>::zeros(2 * k, 2 * k);
    n.view_mut((0, 0), (k, k)).copy_from(&mk);
    n.view_mut((k, k), (k, k)).copy_from(&mk);
    let l = n
        .cholesky()
        .ok_or(LabError::SingularGram { condition: f64::INFINITY })?
        .unpack();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or(LabError::SingularGram { condition: f64::INFINITY })?;
    let a = &l_inv * &e * l_inv.adjoint();
    let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let b = &l_inv * &s;
    let eig = SymmetricEigen::new(a);
    let top = eig.eigenvalues.iter().fold(0.0f64, |x, v| x.max(v.abs()));
    if top == 0.0 {
        return Err(LabError::SingularGram { condition: f64::INFINITY });
    }
    let mut y = DVector::<Complex64>::zeros(2 * k);
    for (i, lam) in eig.eigenvalues.iter().enumerate() {
        if *lam > PINV_CUTOFF * top {
            let v = eig.eigenvectors.column(i);
            let coef = v.adjoint() * &b;
            y += v * (coef[(0, 0)] / *lam);
        }
    }
    let w = l_inv.adjoint() * y;
    let g1 = Poly::new((0..k).map(|j| w[j].conj()).collect());
    let g2 = Poly::new((0..k).map(|j| w[k + j].conj()).collect());
    let combo = &(&(&inst.f1 * &g1) + &(&inst.f2 * &g2)) - &Poly::one();
    let residual = inner(space, &combo, &combo)?.re.max(0.0).sqrt();
    let grid = 4096.max(64 * k);
    Ok(BezoutSolution {
        degree,
        g_norms: (norm(space, &g1)?, norm(space, &g2)?),
        g_sup_norms: (g1.sup_circle(grid), g2.sup_circle(grid)),
        g1,
        g2,
        residual,
        accepted: residual < BEZOUT_ACCEPT,
    })
}

/// One-parameter families of corona data indexed by `t > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoronaFamily {
    /// `f1 = z`, `f2 = t`; then `δ = t` and the minimal solution is `(0, 1/t)`.
    Constant { params: Vec<f64> },
    /// `f1 = (1 + t - z)/(2 + t)`, `f2 = t z`, both divided by
    /// `sup (|f1| + |f2|)`; `δ` is attained near `z = 1`.
    BoundaryApproach { params: Vec<f64> },
}

impl CoronaFamily {
    pub fn params(&self) -> &[f64] {
        match self {
            CoronaFamily::Constant { params } | CoronaFamily::BoundaryApproach { params } => params,
        }
    }

    pub fn instances(&self, grid: DiscGrid) -> Result<Vec<CoronaInstance>> {
        self.params()
            .iter()
            .map(|&t| {
                if !(t > 0.0) {
                    return Err(LabError::InvalidInput(format!("family parameter {t} must be positive")));
                }
                match self {
                    CoronaFamily::Constant { .. } => {
                        CoronaInstance::new(Poly::monomial(1), Poly::from_real(&[t]), grid)
                    }
                    CoronaFamily::BoundaryApproach { .. } => {
                        let f1 = Poly::from_real(&[(1.0 + t) / (2.0 + t), -1.0 / (2.0 + t)]);
                        let f2 = Poly::from_real(&[0.0, t]);
                        let raw = CoronaInstance::new(f1.clone(), f2.clone(), grid)?;
                        let s = Complex64::new(1.0 / raw.upper, 0.0);
                        CoronaInstance::new(f1.scale(s), f2.scale(s), grid)
                    }
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub degree: Option<usize>,
    pub residual: f64,
    pub g1_norm: f64,
    pub g2_norm: f64,
    pub g1_sup: f64,
    pub g2_sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub deltas: Vec<f64>,
    pub norms: Vec<f64>,
    #[serde(rename = "fitted_A")]
    pub fitted_a: f64,
    #[serde(rename = "fitted_logC")]
    pub fitted_log_c: f64,
    pub fit_residual: f64,
    pub rows: Vec<SweepRow>,
}

impl ExponentFit {
    pub fn write_csv<W: std::io::Write>(&self, mut out: W, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "delta,degree,residual,g1_norm,g2_norm")?;
        for r in &self.rows {
            let deg = r.degree.map_or(String::from("NA"), |d| d.to_string());
            writeln!(out, "{:e},{},{:e},{:e},{:e}", r.delta, deg, r.residual, r.g1_norm, r.g2_norm)?;
        }
        Ok(())
    }
}

/// For each instance, the first scheduled degree with an accepted Bézout
/// pair and its larger `g`-norm; then `log norm = log C + A log(1/δ)`.
pub fn exponent_sweep(space: &Space, family: &[CoronaInstance], degree_schedule: &[usize]) -> Result<ExponentFit> {
    if family.is_empty() {
        return Err(LabError::DegenerateFamily { converged: 0 });
    }
    let lo = family.iter().map(|i| i.delta).fold(f64::INFINITY, f64::min);
    let hi = family.iter().map(|i| i.delta).fold(0.0, f64::max);
    if (hi / lo).log10() < 1.5 {
        return Err(LabError::Precondition(format!(
            "deltas span {:.2} decades, need at least 1.5",
            (hi / lo).log10()
        )));
    }
    let rows: Vec<SweepRow> = family
        .par_iter()
        .map(|inst| {
            let mut last = None;
            for &d in degree_schedule {
                let sol = bezout_ls(space, inst, d)?;
                let accepted = sol.accepted;
                last = Some(sol);
                if accepted {
                    break;
                }
            }
            let sol = last.ok_or_else(|| LabError::InvalidInput("empty degree schedule".into()))?;
            Ok(SweepRow {
                delta: inst.delta,
                degree: sol.accepted.then_some(sol.degree),
                residual: sol.residual,
                g1_norm: sol.g_norms.0,
                g2_norm: sol.g_norms.1,
                g1_sup: sol.g_sup_norms.0,
                g2_sup: sol.g_sup_norms.1,
            })
        })
        .collect::<Result<_>>()?;
    let (deltas, norms): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.degree.is_some())
        .map(|r| (r.delta, r.g1_norm.max(r.g2_norm)))
        .unzip();
    if deltas.len() < 4 {
        return Err(LabError::DegenerateFamily { converged: deltas.len() });
    }
    let x: Vec<f64> = deltas.iter().map(|d| -d.ln()).collect();
    let y: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let nf = x.len() as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let fitted_a = sxy / sxx;
    let fitted_log_c = my - fitted_a * mx;
    let fit_residual = (x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - fitted_log_c - fitted_a * a).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    Ok(ExponentFit {
        deltas,
        norms,
        fitted_a,
        fitted_log_c,
        fit_residual,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(f1: &[f64], f2: &[f64]) -> CoronaInstance {
        CoronaInstance::new(Poly::from_real(f1), Poly::from_real(f2), DiscGrid::default()).unwrap()
    }

    #[test]
    fn trivial_identity() {
        let s = bezout_ls(&Space::hardy(), &inst(&[0.0, 1.0], &[1.0, -1.0]), 0).unwrap();
        assert!(s.residual < 1e-14);
        assert!((s.g1.coeff(0) - 1.0).norm() < 1e-12 && (s.g2.coeff(0) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn euclid_pair() {
        // z^2 (3 - 2z) + (1 - z)^2 (1 + 2z) = 1
        let i = inst(&[0.0, 0.0, 1.0], &[1.0, -2.0, 1.0]);
        let s = bezout_ls(&Space::hardy(), &i, 1).unwrap();
        assert!(s.residual < 1e-10, "{}", s.residual);
        assert!((s.g1.coeff(0) - 3.0).norm() < 1e-8 && (s.g1.coeff(1) + 2.0).norm() < 1e-8);
        assert!((s.g2.coeff(0) - 1.0).norm() < 1e-8 && (s.g2.coeff(1) - 2.0).norm() < 1e-8);
    }

    #[test]
    fn residual_monotone_in_degree() {
        let i = inst(&[0.2, -1.0, 0.3], &[0.5, 0.0, 0.0, 0.4]);
        let space = Space::weighted_dirichlet(0.0).unwrap();
        let r: Vec<f64> = (0..6).map(|d| bezout_ls(&space, &i, d).unwrap().residual).collect();
        for w in r.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "{r:?}");
        }
    }

    #[test]
    fn constant_family_is_unbiased() {
        let ts: Vec<f64> = (0..8).map(|k| 0.5 * 0.6f64.powi(k)).collect();
        let fam = CoronaFamily::Constant { params: ts }.instances(DiscGrid::default()).unwrap();
        let fit = exponent_sweep(&Space::hardy(), &fam, &[0, 1, 2]).unwrap();
        assert!((fit.fitted_a - 1.0).abs() < 1e-6, "{}", fit.fitted_a);
    }

    #[test]
    fn empty_family() {
        assert_eq!(
            exponent_sweep(&Space::hardy(), &[], &[0]),
            Err(LabError::DegenerateFamily { converged: 0 })
        );
    }
}

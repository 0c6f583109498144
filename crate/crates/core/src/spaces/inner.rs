use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::gram::GramMatrix;
use super::{Model, Space};
use crate::error::Result;
use crate::polyrat::Poly;
use crate::quadrature::{integrate_checked, QuadratureSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const NONCONVERGENCE_TOL: f64 = 1e-6;

/// Euler Beta function `B(a, b)` for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    (libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)).exp()
}

/// `B(n, beta)` for integer `n >= 1` by the exact product recurrence.
fn beta_int(n: usize, b: f64) -> f64 {
    let mut v = 1.0 / b;
    for k in 1..n {
        v *= k as f64 / (k as f64 + b);
    }
    v
}

/// `||z^n||^2` in the weighted Dirichlet space `D_α`.
fn weighted_diag(n: usize, alpha: f64) -> f64 {
    if n == 0 {
        1.0
    } else {
        (1.0 + alpha) * (n * n) as f64 * beta_int(n, alpha + 1.0)
    }
}

/// `||z^n||_A^p = 1 + n^p B((n-1)p/2 + 1, α+1)` for the Besov algebra norm.
pub fn besov_monomial_algebra_norm_pow(n: usize, p: f64, alpha: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    1.0 + (p * nf.ln() + libm::lgamma((nf - 1.0) * p / 2.0 + 1.0) + libm::lgamma(alpha + 1.0)
        - libm::lgamma((nf - 1.0) * p / 2.0 + alpha + 2.0))
    .exp()
}

/// Difference-quotient Gram at `zeta`: `L[m][n] = <q_m, q_n>` where
/// `q_m = (z^m - zeta^m)/(z - zeta)`.
fn local_gram(zeta: Complex64, size: usize) -> DMatrix<Complex64> {
    let mut l = DMatrix::<Complex64>::zeros(size, size);
    let mut pw = vec![Complex64::new(1.0, 0.0); size.max(1)];
    for k in 1..size {
        pw[k] = pw[k - 1] * zeta;
    }
    for m in 1..size {
        for n in 1..size {
            l[(m, n)] = pw[m - 1] * pw[n - 1].conj() + l[(m - 1, n - 1)];
        }
    }
    l
}

/// Gram matrix of `1, z, ..., z^{size-1}` as a dense matrix.
pub fn monomial_gram_matrix(space: &Space, size: usize) -> Result<DMatrix<Complex64>> {
    space.require_hilbert()?;
    let mut g = DMatrix::<Complex64>::identity(size, size);
    match &space.model {
        Model::Hardy => {}
        Model::Weighted { alpha } | Model::Besov { alpha, .. } => {
            for n in 0..size {
                g[(n, n)] = Complex64::new(weighted_diag(n, *alpha), 0.0);
            }
        }
        Model::DeBrangesRovnyak(m) => {
            let c = m.c_upto(size)?;
            let mut p = DMatrix::<Complex64>::zeros(size, size);
            for i in 0..size {
                for j in 0..size {
                    let prev = if i > 0 && j > 0 { p[(i - 1, j - 1)] } else { ZERO };
                    p[(i, j)] = c[i].conj() * c[j] + prev;
                }
            }
            g += p;
        }
        Model::HarmonicDirichlet(atoms) => {
            for a in atoms.atoms() {
                g += local_gram(a.location, size) * Complex64::new(a.weight, 0.0);
            }
        }
    }
    Ok(g)
}

pub fn monomial_gram(space: &Space, n_max: usize) -> Result<GramMatrix> {
    let entries = monomial_gram_matrix(space, n_max + 1)?;
    let labels = (0..=n_max).map(|k| format!("z^{k}")).collect();
    Ok(GramMatrix::new(entries, labels))
}

/// `||z^n||^2` without forming the full Gram matrix.
pub fn monomial_norm_sq(space: &Space, n: usize) -> Result<f64> {
    space.require_hilbert()?;
    Ok(match &space.model {
        Model::Hardy => 1.0,
        Model::Weighted { alpha } | Model::Besov { alpha, .. } => weighted_diag(n, *alpha),
        Model::DeBrangesRovnyak(m) => 1.0 + m.c_upto(n + 1)?.iter().map(|c| c.norm_sqr()).sum::<f64>(),
        Model::HarmonicDirichlet(atoms) => {
            1.0 + atoms
                .atoms()
                .iter()
                .map(|a| {
                    let r2 = a.location.norm_sqr();
                    a.weight * (0..n).map(|k| r2.powi(k as i32)).sum::<f64>()
                })
                .sum::<f64>()
        }
    })
}

fn l2(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    f.iter().zip(g).map(|(a, b)| a * b.conj()).sum()
}

/// `<f, g>` in the space (linear in `f`).
pub fn inner(space: &Space, f: &Poly, g: &Poly) -> Result<Complex64> {
    space.require_hilbert()?;
    let (fc, gc) = (f.coeffs(), g.coeffs());
    let base = l2(fc, gc);
    Ok(match &space.model {
        Model::Hardy => base,
        Model::Weighted { alpha } | Model::Besov { alpha, .. } => fc
            .iter()
            .zip(gc)
            .enumerate()
            .map(|(n, (a, b))| a * b.conj() * weighted_diag(n, *alpha))
            .sum(),
        Model::DeBrangesRovnyak(m) => {
            let len = fc.len().max(gc.len());
            let c = m.c_upto(len)?;
            let plus = |h: &[Complex64]| -> Vec<Complex64> {
                (0..h.len())
                    .map(|k| (0..h.len() - k).map(|j| h[k + j] * c[j].conj()).sum())
                    .collect()
            };
            base + l2(&plus(fc), &plus(gc))
        }
        Model::HarmonicDirichlet(atoms) => {
            let mut s = base;
            for a in atoms.atoms() {
                let (qf, _) = f.synth_div(a.location);
                let (qg, _) = g.synth_div(a.location);
                s += l2(qf.coeffs(), qg.coeffs()) * a.weight;
            }
            s
        }
    })
}

/// Gram matrix `entries[i][j] = <basis_i, basis_j>`.
pub fn gram(space: &Space, basis: &[Poly]) -> Result<GramMatrix> {
    let size = basis.iter().map(|p| p.len()).max().unwrap_or(0).max(1);
    let m = monomial_gram_matrix(space, size)?;
    let b = DMatrix::from_fn(basis.len(), size, |i, k| basis[i].coeff(k));
    let entries = &b * m * b.adjoint();
    let labels = basis.iter().map(|p| p.to_string()).collect();
    Ok(GramMatrix::new(entries, labels))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub value: f64,
    /// Relative change of the quadrature under node doubling, if used.
    pub quadrature_change: Option<f64>,
    pub warnings: Vec<String>,
}

fn sup_grid(f: &Poly) -> usize {
    4096.max(64 * f.len())
}

/// Node counts large enough for `|f'|^p` with `deg f' = d`.
fn adapted(q: QuadratureSpec, d: usize, p: f64) -> QuadratureSpec {
    let need = (d as f64 * p).ceil() as usize;
    QuadratureSpec {
        radial_nodes: q.radial_nodes.max(need / 2 + 16),
        angular_nodes: q.angular_nodes.max(2 * need + 8),
    }
}

/// `∫ |f'|^p (1-|z|^2)^α dA` with the doubling diagnostic.
fn derivative_integral(space: &Space, f: &Poly, p: f64, alpha: f64) -> (f64, Option<f64>) {
    let df = f.derivative();
    if df.is_zero() {
        return (0.0, None);
    }
    if p == 2.0 {
        let exact = df
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, a)| a.norm_sqr() * beta_int(k + 1, alpha + 1.0))
            .sum();
        return (exact, None);
    }
    let q = adapted(space.quadrature(), df.len() - 1, p);
    let (v, change) = integrate_checked(q, alpha, |z| df.eval(z).norm().powf(p));
    (v, Some(change))
}

/// Space norm, or the Besov algebra norm when `algebra` is set (for other
/// spaces the algebra variant falls back to [`algebra_norm`]).
pub fn norm_report(space: &Space, f: &Poly, algebra: bool) -> Result<NormReport> {
    let mut warnings = Vec::new();
    if f.is_zero() {
        return Ok(NormReport { value: 0.0, quadrature_change: None, warnings });
    }
    if algebra {
        let (value, change) = algebra_norm_inner(space, f)?;
        if let Some(c) = change {
            if c > NONCONVERGENCE_TOL {
                warnings.push(format!("quadrature changed by {c:e} under node doubling"));
            }
        }
        return Ok(NormReport { value, quadrature_change: change, warnings });
    }
    match space.model {
        Model::Besov { p, alpha } if p != 2.0 => {
            let (i, change) = derivative_integral(space, f, p, alpha);
            let value = (f.coeff(0).norm().powf(p) + (1.0 + alpha) * i).powf(1.0 / p);
            if let Some(c) = change {
                if c > NONCONVERGENCE_TOL {
                    warnings.push(format!("quadrature changed by {c:e} under node doubling"));
                }
            }
            Ok(NormReport { value, quadrature_change: change, warnings })
        }
        _ => Ok(NormReport {
            value: inner(space, f, f)?.re.max(0.0).sqrt(),
            quadrature_change: None,
            warnings,
        }),
    }
}

pub fn norm(space: &Space, f: &Poly) -> Result<f64> {
    Ok(norm_report(space, f, false)?.value)
}

fn algebra_norm_inner(space: &Space, f: &Poly) -> Result<(f64, Option<f64>)> {
    let sup = f.sup_circle(sup_grid(f));
    Ok(match space.model {
        Model::Hardy => (sup, None),
        Model::Weighted { alpha } => {
            let (i, c) = derivative_integral(space, f, 2.0, alpha);
            ((sup * sup + i).sqrt(), c)
        }
        Model::Besov { p, alpha } => {
            let (i, c) = derivative_integral(space, f, p, alpha);
            ((sup.powf(p) + i).powf(1.0 / p), c)
        }
        Model::DeBrangesRovnyak(_) | Model::HarmonicDirichlet(_) => (sup + norm(space, f)?, None),
    })
}

/// Norm in the algebra attached to the space: `sup` for the Hardy space,
/// `(sup^p + ∫|f'|^p (1-|z|^2)^α dA)^{1/p}` for Dirichlet-type spaces, and
/// `sup + ||f||` for `H(b)` and `D(μ)`.
pub fn algebra_norm(space: &Space, f: &Poly) -> Result<f64> {
    Ok(algebra_norm_inner(space, f)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrat::Rat;
    use crate::spaces::MeasureAtoms;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hardy_monomials_orthonormal() {
        let h = Space::hardy();
        assert_eq!(inner(&h, &Poly::monomial(2), &Poly::monomial(2)).unwrap(), c(1.0));
        assert_eq!(inner(&h, &Poly::monomial(1), &Poly::monomial(2)).unwrap(), c(0.0));
        let g = monomial_gram(&h, 2).unwrap();
        assert_eq!(g.entries, DMatrix::identity(3, 3));
    }

    #[test]
    fn dirichlet_monomial() {
        let d = Space::weighted_dirichlet(0.0).unwrap();
        let v = inner(&d, &Poly::monomial(3), &Poly::monomial(3)).unwrap();
        assert!((v.re - 3.0).abs() < 1e-14);
        // (1+α) n^2 B(n, α+1) against the log-gamma form
        for alpha in [-0.5, 0.7, 2.0] {
            let w = weighted_diag(7, alpha);
            assert!((w - (1.0 + alpha) * 49.0 * beta(7.0, alpha + 1.0)).abs() < 1e-12 * w);
        }
    }

    #[test]
    fn dirichlet_quadrature_agrees_with_beta() {
        let s = Space::besov_dirichlet(2.0, 0.5).unwrap();
        let f = Poly::from_real(&[0.3, -1.0, 0.5, 0.25]);
        let df = f.derivative();
        let (q, _) = integrate_checked(QuadratureSpec::default(), 0.5, |z| df.eval(z).norm_sqr());
        let exact = (norm(&s, &f).unwrap().powi(2) - 0.09) / 1.5;
        assert!((q - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn harmonic_dirichlet_at_one() {
        let s = Space::harmonic_dirichlet(MeasureAtoms::dirac(c(1.0)).unwrap()).unwrap();
        for n in 0..6 {
            let v = inner(&s, &Poly::monomial(n), &Poly::monomial(n)).unwrap();
            assert!((v.re - (1 + n) as f64).abs() < 1e-13);
        }
        let g = monomial_gram(&s, 2).unwrap();
        assert_eq!(g.diagonal(), vec![1.0, 2.0, 3.0]);
        // q_1 = 1, q_2 = 1 + z
        assert!((g.get(1, 2) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn hb_gram_example() {
        let s = Space::de_branges_rovnyak(Rat::from(Poly::from_real(&[0.5, 0.5]))).unwrap();
        let g = monomial_gram(&s, 2).unwrap();
        let want = [[2.0, 2.0, 2.0], [2.0, 6.0, 6.0], [2.0, 6.0, 10.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.get(i, j) - c(want[i][j])).norm() < 1e-10, "{i}{j}");
            }
        }
        assert!((norm(&s, &Poly::monomial(5)).unwrap() - 22f64.sqrt()).abs() < 1e-10);
        // inner() via plus functions agrees with the Gram matrix
        let f = Poly::from_real(&[1.0, -2.0, 0.5]);
        let h = Poly::new(vec![c(0.0), Complex64::new(1.0, 1.0), c(3.0)]);
        let direct = inner(&s, &f, &h).unwrap();
        let via = gram(&s, &[f, h]).unwrap().get(0, 1);
        assert!((direct - via).norm() < 1e-10);
    }

    #[test]
    fn besov_algebra_norm_of_z() {
        let s = Space::besov_dirichlet(2.0, 0.0).unwrap();
        let r = norm_report(&s, &Poly::monomial(1), true).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-12);
        assert!((besov_monomial_algebra_norm_pow(1, 2.0, 0.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn besov_p3_quadrature_converges() {
        let s = Space::besov_dirichlet(3.0, 1.5).unwrap();
        let r = norm_report(&s, &Poly::monomial(4), true).unwrap();
        let exact = besov_monomial_algebra_norm_pow(4, 3.0, 1.5).powf(1.0 / 3.0);
        assert!((r.value - exact).abs() < 1e-8 * exact, "{} {}", r.value, exact);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn non_hilbert_rejected() {
        let s = Space::besov_dirichlet(3.0, 1.5).unwrap();
        assert!(inner(&s, &Poly::one(), &Poly::one()).is_err());
        assert!(norm(&s, &Poly::one()).is_ok());
    }
}

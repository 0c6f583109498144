use nalgebra::DVector;
use num_complex::Complex64;

use super::inner::monomial_gram_matrix;
use super::{Model, Space};
use crate::error::{LabError, Result};

/// Reproducing kernel `k_λ(z)`, so that `f(λ) = <f, k_λ>`.
pub fn kernel(space: &Space, lambda: Complex64, z: Complex64) -> Result<Complex64> {
    if lambda.norm() >= 1.0 || z.norm() >= 1.0 {
        return Err(LabError::InvalidInput("kernel needs points in the open disc".into()));
    }
    space.require_hilbert()?;
    let one = Complex64::new(1.0, 0.0);
    let w = lambda.conj() * z;
    match &space.model {
        Model::Hardy => Ok(one / (one - w)),
        Model::DeBrangesRovnyak(m) => {
            let (bl, bz) = (m.b.eval(lambda)?, m.b.eval(z)?);
            Ok((one - bl.conj() * bz) / (one - w))
        }
        Model::Weighted { .. } | Model::Besov { .. } => {
            // diagonal Gram: k = sum w^n / ||z^n||^2
            let mut s = Complex64::new(0.0, 0.0);
            let mut pw = one;
            let mut n = 0usize;
            loop {
                let term = pw / super::inner::monomial_norm_sq(space, n)?;
                s += term;
                if term.norm() <= 1e-17 * s.norm() || n > 1_000_000 {
                    break;
                }
                pw *= w;
                n += 1;
            }
            Ok(s)
        }
        Model::HarmonicDirichlet(_) => truncated_kernel(space, lambda, z),
    }
}

/// Kernel of the polynomial section of degree `< size`, doubling `size`
/// until two consecutive values agree.
fn truncated_kernel(space: &Space, lambda: Complex64, z: Complex64) -> Result<Complex64> {
    let mut prev: Option<Complex64> = None;
    let mut size = 32;
    loop {
        let g = monomial_gram_matrix(space, size)?;
        let e = DVector::from_fn(size, |k, _| lambda.powi(k as i32));
        let chol = g
            .cholesky()
            .ok_or(LabError::SingularGram { condition: f64::INFINITY })?;
        // G conj(a) = e(λ) for k_λ = sum a_m z^m
        let ca = chol.solve(&e);
        let v: Complex64 = (0..size).map(|m| ca[m].conj() * z.powi(m as i32)).sum();
        if let Some(p) = prev {
            if (v - p).norm() <= 1e-10 * v.norm() {
                return Ok(v);
            }
        }
        if size >= 1024 {
            return Err(LabError::NonConvergence {
                iterations: size,
                residual: prev.map_or(f64::INFINITY, |p| (v - p).norm()),
            });
        }
        prev = Some(v);
        size *= 2;
    }
}

//! Optimal polynomial approximants `p` minimizing `||p f - 1||`, distances
//! to shifted spans, cyclicity scans and bounded point evaluations.

mod bpe;
mod descent;
mod scan;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::polyrat::Poly;
use crate::spaces::{gram, inner, monomial_gram_matrix, Space};

pub use bpe::{bpe_estimate, BpeReport};
pub use descent::{opa_descent, DescentParams};
pub use scan::{cyclicity_scan, default_schedule, CyclicityReport, DecayFit, FitModel, Verdict, PLATEAU_FLOOR, PLATEAU_TOLERANCE};

/// Condition number above which a Gram system is declared singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximantResult {
    pub degree: usize,
    pub coefficients: Poly,
    pub distance: f64,
    pub residual_poly: Poly,
    /// Condition number of the normal equations (absent for descent).
    pub condition: Option<f64>,
}

/// Solves the Hermitian system `A x = rhs`, refusing condition numbers
/// beyond [`MAX_CONDITION`].
pub(crate) fn hermitian_solve(a: &DMatrix<Complex64>, rhs: &DVector<Complex64>) -> Result<(DVector<Complex64>, f64)> {
    let eig = SymmetricEigen::new(a.clone()).eigenvalues;
    let hi = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lo = eig.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(LabError::SingularGram { condition });
    }
    let x = match a.clone().cholesky() {
        Some(ch) => ch.solve(rhs),
        None => a
            .clone()
            .full_piv_lu()
            .solve(rhs)
            .ok_or(LabError::SingularGram { condition })?,
    };
    Ok((x, condition))
}

/// Best approximation of `target` by `span{basis}`; returns the
/// coefficients, the distance and the condition number.
pub(crate) fn project(space: &Space, basis: &[Poly], target: &Poly) -> Result<(Vec<Complex64>, f64, f64)> {
    let g = gram(space, basis)?;
    // <x_j b_j, b_i> summed over j gives A = G^T
    let a = g.entries.transpose();
    let size = basis.iter().map(|p| p.len()).max().unwrap_or(1).max(target.len());
    let m = monomial_gram_matrix(space, size)?;
    let t = DVector::from_fn(size, |k, _| target.coeff(k));
    let rhs = DVector::from_fn(basis.len(), |i, _| {
        let b = DVector::from_fn(size, |k, _| basis[i].coeff(k).conj());
        (t.transpose() * &m * b)[(0, 0)]
    });
    let (x, condition) = hermitian_solve(&a, &rhs)?;
    let mut approx = Poly::zero();
    for (xi, b) in x.iter().zip(basis) {
        approx = &approx + &b.scale(*xi);
    }
    let r = &approx - target;
    let distance = inner(space, &r, &r)?.re.max(0.0).sqrt();
    Ok((x.iter().copied().collect(), distance, condition))
}

fn shifted_basis(f: &Poly, degree: usize) -> Vec<Poly> {
    (0..=degree).map(|k| f.shift(k)).collect()
}

/// Optimal polynomial approximant of `1/f` of the given degree.
pub fn opa(space: &Space, f: &Poly, degree: usize) -> Result<ApproximantResult> {
    if f.is_zero() {
        return Err(LabError::InvalidInput("f must not be the zero polynomial".into()));
    }
    space.require_hilbert()?;
    let (x, distance, condition) = project(space, &shifted_basis(f, degree), &Poly::one())?;
    let coefficients = Poly::new(x);
    let residual_poly = &(&coefficients * f) - &Poly::one();
    Ok(ApproximantResult {
        degree,
        coefficients,
        distance,
        residual_poly,
        condition: Some(condition),
    })
}

/// `dist(target, span{z^k f : k <= degree})`.
pub fn dist_to_span(space: &Space, target: &Poly, f: &Poly, degree: usize) -> Result<f64> {
    if f.is_zero() {
        return Err(LabError::InvalidInput("f must not be the zero polynomial".into()));
    }
    space.require_hilbert()?;
    Ok(project(space, &shifted_basis(f, degree), target)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Poly {
        Poly::from_real(c)
    }

    #[test]
    fn hardy_one_minus_z() {
        let h = Space::hardy();
        let r = opa(&h, &p(&[1.0, -1.0]), 0).unwrap();
        assert!((r.coefficients.coeff(0).re - 0.5).abs() < 1e-14);
        assert!((r.distance.powi(2) - 0.5).abs() < 1e-14);
        for n in 0..=20 {
            let d = opa(&h, &p(&[1.0, -1.0]), n).unwrap().distance;
            assert!((d * d - 1.0 / (n as f64 + 2.0)).abs() < 1e-12, "{n}");
        }
    }

    #[test]
    fn z_is_not_cyclic_in_hardy() {
        let h = Space::hardy();
        for n in [0, 3, 9] {
            assert!((opa(&h, &Poly::monomial(1), n).unwrap().distance - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn span_distances() {
        let h = Space::hardy();
        let f = p(&[1.0, -1.0]);
        assert!(dist_to_span(&h, &f, &f, 0).unwrap() < 1e-14);
        assert!(dist_to_span(&h, &p(&[1.0, -2.0, 1.0]), &f, 1).unwrap() < 1e-10);
    }

    #[test]
    fn zero_f_rejected() {
        assert!(opa(&Space::hardy(), &Poly::zero(), 2).is_err());
    }
}

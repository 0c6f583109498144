use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::spaces::{monomial_gram_matrix, Space};

/// Relative Cauchy tolerance on the last doubling window.
pub const BPE_TOLERANCE: f64 = 1e-3;

/// `v_n = sup{ |p(ζ)| : deg p <= n, ||p|| <= 1 }` for `n = 0..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpeReport {
    pub zeta: Complex64,
    pub values: Vec<f64>,
    pub bounded_flag: bool,
    pub tolerance: f64,
}

impl BpeReport {
    pub fn value(&self, n: usize) -> f64 {
        self.values[n]
    }
}

pub fn bpe_estimate(space: &Space, zeta: Complex64, n_max: usize) -> Result<BpeReport> {
    space.require_hilbert()?;
    if ((zeta.norm() - 1.0).abs()) > 1e-12 {
        return Err(LabError::InvalidInput(format!("zeta = {zeta} is not unimodular")));
    }
    let g = monomial_gram_matrix(space, n_max + 1)?;
    let l = g
        .cholesky()
        .ok_or(LabError::SingularGram { condition: f64::INFINITY })?
        .unpack();
    let e = DVector::from_fn(n_max + 1, |k, _| zeta.powu(k as u32));
    // v_n^2 = e* G_n^{-1} e = |L_n^{-1} e|^2, and L_n is the leading block of L
    let y = l
        .solve_lower_triangular(&e)
        .ok_or(LabError::SingularGram { condition: f64::INFINITY })?;
    let mut acc = 0.0;
    let values: Vec<f64> = y
        .iter()
        .map(|v| {
            acc += v.norm_sqr();
            acc.sqrt()
        })
        .collect();
    let last = values[n_max];
    let half = values[n_max / 2];
    Ok(BpeReport {
        zeta,
        bounded_flag: last - half <= BPE_TOLERANCE * last,
        values,
        tolerance: BPE_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrat::{Poly, Rat};

    #[test]
    fn hardy_is_unbounded() {
        let r = bpe_estimate(&Space::hardy(), Complex64::new(1.0, 0.0), 64).unwrap();
        for (n, v) in r.values.iter().enumerate() {
            assert!((v * v - (n + 1) as f64).abs() < 1e-10);
        }
        assert!(!r.bounded_flag);
    }

    #[test]
    fn hb_is_bounded() {
        let s = Space::de_branges_rovnyak(Rat::from(Poly::from_real(&[0.5, 0.5]))).unwrap();
        let r = bpe_estimate(&s, Complex64::new(1.0, 0.0), 64).unwrap();
        assert!((r.values[1].powi(2) - 0.5).abs() < 1e-12);
        assert!(r.bounded_flag);
    }

    #[test]
    fn dirichlet_harmonic_sum() {
        let s = Space::weighted_dirichlet(0.0).unwrap();
        let r = bpe_estimate(&s, Complex64::new(1.0, 0.0), 100).unwrap();
        let h: f64 = 1.0 + (1..=100).map(|k| 1.0 / k as f64).sum::<f64>();
        assert!((r.values[100].powi(2) - h).abs() < 1e-10);
        assert!(!r.bounded_flag);
    }
}

//! Product rules on the unit disc for the normalized area measure
//! `dA = r dr dθ / π`, optionally weighted by `(1 - |z|^2)^α`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Radial and angular node counts of the disc rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: 128,
            angular_nodes: 256,
        }
    }
}

impl QuadratureSpec {
    pub fn doubled(&self) -> Self {
        QuadratureSpec {
            radial_nodes: 2 * self.radial_nodes,
            angular_nodes: 2 * self.angular_nodes,
        }
    }
}

/// Gauss–Jacobi nodes and weights on `[-1, 1]` for `(1-x)^a (1+x)^b`,
/// via the Golub–Welsch eigenvalue problem.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0 && a > -1.0 && b > -1.0);
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        j[(k, k)] = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + a + b;
            let off2 = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1.0) * (s - 1.0));
            let off = off2.sqrt();
            j[(k, k + 1)] = off;
            j[(k + 1, k)] = off;
        }
    }
    let mu0 = ((a + b + 1.0) * std::f64::consts::LN_2 + libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0)
        - libm::lgamma(a + b + 2.0))
    .exp();
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    pairs.into_iter().unzip()
}

/// Gauss–Legendre nodes and weights on `[lo, hi]`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(n, 0.0, 0.0);
    let h = 0.5 * (hi - lo);
    (
        x.iter().map(|x| lo + h * (x + 1.0)).collect(),
        w.iter().map(|w| w * h).collect(),
    )
}

/// Tensor rule for `∫_D F(z) (1-|z|^2)^α dA(z)`.
#[derive(Clone, Debug)]
pub struct DiscRule {
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub angular_nodes: usize,
}

impl DiscRule {
    pub fn new(spec: QuadratureSpec, alpha: f64) -> Self {
        let (x, w) = gauss_jacobi(spec.radial_nodes, alpha, 0.0);
        // r = (1+x)/2, so (1-r^2)^α dr = 2^{-α-1} (1+r)^α (1-x)^α dx
        let scale = 0.5f64.powf(alpha + 1.0);
        let radii: Vec<f64> = x.iter().map(|x| 0.5 * (1.0 + x)).collect();
        let radial_weights = radii
            .iter()
            .zip(&w)
            .map(|(r, w)| w * scale * (1.0 + r).powf(alpha) * 2.0 * r)
            .collect();
        DiscRule {
            radii,
            radial_weights,
            angular_nodes: spec.angular_nodes,
        }
    }

    pub fn integrate<F: Fn(Complex64) -> f64>(&self, f: F) -> f64 {
        let m = self.angular_nodes;
        let mut total = 0.0;
        for (r, w) in self.radii.iter().zip(&self.radial_weights) {
            let mut ring = 0.0;
            for j in 0..m {
                ring += f(Complex64::from_polar(*r, 2.0 * PI * j as f64 / m as f64));
            }
            total += w * ring / m as f64;
        }
        total
    }
}

/// Integral with the node counts doubled as a convergence check. Returns the
/// refined value and the relative change.
pub fn integrate_checked<F: Fn(Complex64) -> f64>(spec: QuadratureSpec, alpha: f64, f: F) -> (f64, f64) {
    let coarse = DiscRule::new(spec, alpha).integrate(&f);
    let fine = DiscRule::new(spec.doubled(), alpha).integrate(&f);
    let rel = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    (fine, if fine == 0.0 && coarse == 0.0 { 0.0 } else { rel })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5, 0.0, 1.0);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((s - 0.1).abs() < 1e-15);
    }

    #[test]
    fn jacobi_moment() {
        // ∫ (1-x)^{-1/2} dx over [-1,1] = 2 sqrt 2
        let (_, w) = gauss_jacobi(12, -0.5, 0.0);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn disc_mass_and_weighted_moments() {
        let spec = QuadratureSpec::default();
        assert!((DiscRule::new(spec, 0.0).integrate(|_| 1.0) - 1.0).abs() < 1e-13);
        // ∫ |z|^2 (1-|z|^2)^α dA = B(2, α+1)
        for alpha in [-0.7, 0.0, 1.5] {
            let got = DiscRule::new(spec, alpha).integrate(|z| z.norm_sqr());
            let want = 1.0 / ((alpha + 1.0) * (alpha + 2.0));
            assert!((got - want).abs() < 1e-12 * want, "{alpha}: {got} vs {want}");
        }
    }
}

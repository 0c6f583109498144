use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex polynomial, `coeffs[k]` is the coefficient of `z^k`.
///
/// The zero polynomial is the empty coefficient vector; otherwise the last
/// stored coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(ONE)
    }

    /// The monomial `chi_n(z) = z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = ONE;
        Poly { coeffs }
    }

    /// `lead * prod (z - r)` over the given roots.
    pub fn from_roots(roots: &[Complex64], lead: Complex64) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Number of stored coefficients (degree + 1, or 0).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `sum |a_k| |z|^k`, the natural scale for rounding errors of `eval(z)`.
    pub fn eval_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// `k`-th derivative.
    pub fn nth_derivative(&self, k: usize) -> Poly {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Drops trailing coefficients below `rel_tol * max |a_k|`.
    pub fn trim(&self, rel_tol: f64) -> Poly {
        let max = self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= rel_tol * max) {
            coeffs.pop();
        }
        Poly::new(coeffs)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Squared coefficient l2 norm, i.e. the squared Hardy norm.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Sum `k |a_k|`: an upper bound for `|p'|` on the closed disc.
    pub fn derivative_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| k as f64 * c.norm())
            .sum()
    }

    /// Synthetic division by `z - w`: returns `(q, r)` with
    /// `p(z) = (z - w) q(z) + r` and `r = p(w)`.
    pub fn synth_div(&self, w: Complex64) -> (Poly, Complex64) {
        let n = self.coeffs.len();
        if n == 0 {
            return (Poly::zero(), ZERO);
        }
        if n == 1 {
            return (Poly::zero(), self.coeffs[0]);
        }
        let mut q = vec![ZERO; n - 1];
        let mut acc = self.coeffs[n - 1];
        for k in (0..n - 1).rev() {
            q[k] = acc;
            acc = acc * w + self.coeffs[k];
        }
        (Poly::new(q), acc)
    }

    /// Values on the uniform grid `z_j = r e^{2 pi i j / n}`.
    pub fn circle_values(&self, radius: f64, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                let z = Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64);
                self.eval(z)
            })
            .collect()
    }

    /// Max modulus over a uniform grid of `grid_size` points on `|z| = radius`.
    pub fn sup_circle_radius(&self, radius: f64, grid_size: usize) -> f64 {
        self.circle_values(radius, grid_size.max(1))
            .into_iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn sup_circle(&self, grid_size: usize) -> f64 {
        self.sup_circle_radius(1.0, grid_size)
    }

    pub fn conj_coeffs(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.len() + rhs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})z"),
                _ => format!("({c})z^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Polynomials serialize as arrays of `[re, im]` pairs, lowest degree first.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        if pairs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(serde::de::Error::custom("non-finite polynomial coefficient"));
        }
        Ok(Poly::new(
            pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Poly::from_real(&[1.0, -1.0]).eval(c(1.0, 0.0)), c(0.0, 0.0));
        assert_eq!(Poly::monomial(3).eval(c(2.0, 0.0)), c(8.0, 0.0));
        let v = Poly::from_real(&[0.5, 0.5]).eval(c(0.0, 1.0));
        assert!((v - c(0.5, 0.5)).norm() < 1e-15);
        assert!((v.norm() - 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_polynomial_is_empty() {
        let p = Poly::from_real(&[0.0, 0.0]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        assert_eq!((&Poly::one() - &Poly::one()).degree(), None);
    }

    #[test]
    fn synth_div_examples() {
        let (q, r) = Poly::from_real(&[-1.0, 0.0, 1.0]).synth_div(c(1.0, 0.0));
        assert_eq!(q, Poly::from_real(&[1.0, 1.0]));
        assert_eq!(r, c(0.0, 0.0));

        let n = 7;
        let (q, r) = Poly::monomial(n).synth_div(c(1.0, 0.0));
        assert_eq!(q, Poly::from_real(&vec![1.0; n]));
        assert_eq!(r, c(1.0, 0.0));
        // multiply back
        let back = &(&q * &Poly::from_real(&[-1.0, 1.0])) + &Poly::constant(r);
        assert_eq!(back, Poly::monomial(n));

        let (q, r) = Poly::constant(c(3.0, -2.0)).synth_div(c(0.3, 0.1));
        assert!(q.is_zero());
        assert_eq!(r, c(3.0, -2.0));
    }

    #[test]
    fn from_roots_expands() {
        let p = Poly::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)], c(1.0, 0.0));
        assert_eq!(p, Poly::from_real(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn serde_pairs() {
        let p = Poly::new(vec![c(1.0, 0.0), c(0.0, -2.0)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[1.0,0.0],[0.0,-2.0]]");
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn sup_circle_examples() {
        assert!((Poly::monomial(1).sup_circle(64) - 1.0).abs() < 1e-15);
        assert!((Poly::from_real(&[1.0, -1.0]).sup_circle(64) - 2.0).abs() < 1e-15);
        assert!((Poly::from_real(&[0.5, 0.5]).sup_circle(64) - 1.0).abs() < 1e-15);
    }
}

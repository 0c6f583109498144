//! Newton descent for `min ||p f - 1||^p` in Besov–Dirichlet spaces `D^p_α`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ApproximantResult;
use crate::error::{LabError, Result};
use crate::polyrat::Poly;
use crate::quadrature::{DiscRule, QuadratureSpec};
use crate::spaces::{norm, Model, Space};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentParams {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
}

impl Default for DescentParams {
    fn default() -> Self {
        DescentParams {
            max_iterations: 200,
            gradient_tolerance: 1e-8,
        }
    }
}

/// Sampled objective `|u(0)|^P + Σ_q W_q |u'(z_q)|^P`, where `u = p f - 1`
/// and `p = Σ x_k z^k`. Values of the basis at the nodes are precomputed.
struct Objective {
    exponent: f64,
    weights: Vec<f64>,
    /// Row `q` holds the basis functions at node `q`; row 0 is `(z^k f)(0)`,
    /// the rest are `(z^k f)'(z_q)`.
    basis: DMatrix<Complex64>,
    offset: Vec<Complex64>,
}

impl Objective {
    fn new(f: &Poly, degree: usize, p: f64, alpha: f64, q: QuadratureSpec) -> Self {
        let rule = DiscRule::new(q, alpha);
        let m = rule.angular_nodes;
        let k = degree + 1;
        let nodes = 1 + rule.radii.len() * m;
        let mut basis = DMatrix::<Complex64>::zeros(nodes, k);
        let mut weights = vec![1.0; nodes];
        let mut offset = vec![Complex64::new(0.0, 0.0); nodes];
        offset[0] = Complex64::new(-1.0, 0.0);
        let derivs: Vec<Poly> = (0..k).map(|j| f.shift(j).derivative()).collect();
        for j in 0..k {
            basis[(0, j)] = f.shift(j).coeff(0);
        }
        let mut row = 1;
        for (r, w) in rule.radii.iter().zip(&rule.radial_weights) {
            for a in 0..m {
                let z = Complex64::from_polar(*r, 2.0 * std::f64::consts::PI * a as f64 / m as f64);
                for j in 0..k {
                    basis[(row, j)] = derivs[j].eval(z);
                }
                weights[row] = (1.0 + alpha) * w / m as f64;
                row += 1;
            }
        }
        Objective { exponent: p, weights, basis, offset }
    }

    fn values(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let mut u = &self.basis * x;
        for (v, o) in u.iter_mut().zip(&self.offset) {
            *v += o;
        }
        u
    }

    fn value(&self, x: &DVector<Complex64>) -> f64 {
        self.values(x)
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| w * u.norm().powf(self.exponent))
            .sum()
    }

    /// Gradient and Hessian in the real coordinates `(Re x_0, Im x_0, ...)`.
    fn derivatives(&self, x: &DVector<Complex64>) -> (DVector<f64>, DMatrix<f64>) {
        let k = x.len();
        let p = self.exponent;
        let u = self.values(x);
        let mut grad = DVector::<f64>::zeros(2 * k);
        let mut hess = DMatrix::<f64>::zeros(2 * k, 2 * k);
        let mut jac = vec![[0.0f64; 2]; 2 * k];
        for q in 0..u.len() {
            let uq = u[q];
            let a = uq.norm();
            if a == 0.0 && p < 2.0 {
                continue;
            }
            let w = self.weights[q];
            for j in 0..k {
                let b = self.basis[(q, j)];
                // d u / d Re x_j = b, d u / d Im x_j = i b
                jac[2 * j] = [b.re, b.im];
                jac[2 * j + 1] = [-b.im, b.re];
            }
            let s = p * a.powf(p - 2.0);
            let t = if a > 0.0 { p * (p - 2.0) * a.powf(p - 4.0) } else { 0.0 };
            let v = [uq.re, uq.im];
            let proj: Vec<f64> = jac.iter().map(|g| g[0] * v[0] + g[1] * v[1]).collect();
            for i in 0..2 * k {
                grad[i] += w * s * proj[i];
                for l in i..2 * k {
                    let dot = jac[i][0] * jac[l][0] + jac[i][1] * jac[l][1];
                    hess[(i, l)] += w * (s * dot + t * proj[i] * proj[l]);
                }
            }
        }
        for i in 0..2 * k {
            for l in 0..i {
                hess[(i, l)] = hess[(l, i)];
            }
        }
        (grad, hess)
    }
}

/// Minimizes `||p f - 1||` over `deg p <= degree` in `D^p_α` by damped Newton
/// iterations on the quadrature-discretized objective.
pub fn opa_descent(space: &Space, f: &Poly, degree: usize, params: DescentParams) -> Result<ApproximantResult> {
    let Model::Besov { p, alpha } = space.model else {
        return Err(LabError::InvalidInput("descent is defined for Besov-Dirichlet spaces".into()));
    };
    if f.is_zero() {
        return Err(LabError::InvalidInput("f must not be the zero polynomial".into()));
    }
    let need = ((f.len() + degree) as f64 * p).ceil() as usize;
    let q = space.quadrature();
    let q = QuadratureSpec {
        radial_nodes: q.radial_nodes.max(need / 2 + 16),
        angular_nodes: q.angular_nodes.max(2 * need + 8),
    };
    let obj = Objective::new(f, degree, p, alpha, q);
    let k = degree + 1;
    let f0 = f.coeff(0);
    let mut x = DVector::<Complex64>::zeros(k);
    if f0.norm() > 0.0 {
        x[0] = Complex64::new(1.0, 0.0) / f0;
    }
    let mut value = obj.value(&x);
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    for _ in 0..params.max_iterations {
        let (g, mut h) = obj.derivatives(&x);
        grad_norm = g.norm();
        if grad_norm <= params.gradient_tolerance {
            converged = true;
            break;
        }
        let ridge = 1e-14 * h.diagonal().amax().max(1e-300);
        for i in 0..2 * k {
            h[(i, i)] += ridge;
        }
        let step = match h.clone().cholesky() {
            Some(ch) => ch.solve(&(-&g)),
            None => -&g,
        };
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let cand = DVector::from_fn(k, |j, _| x[j] + Complex64::new(step[2 * j], step[2 * j + 1]) * t);
            let v = obj.value(&cand);
            if v <= value - 1e-4 * t * (-g.dot(&step)).max(0.0) || v < value {
                x = cand;
                value = v;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no further decrease is representable at this precision
            let (g, _) = obj.derivatives(&x);
            grad_norm = g.norm();
            converged = grad_norm <= params.gradient_tolerance;
            break;
        }
    }
    if !converged {
        return Err(LabError::NonConvergence {
            iterations: params.max_iterations,
            residual: grad_norm,
        });
    }
    let coefficients = Poly::new(x.iter().copied().collect());
    let residual_poly = &(&coefficients * f) - &Poly::one();
    let distance = norm(space, &residual_poly)?;
    Ok(ApproximantResult {
        degree,
        coefficients,
        distance,
        residual_poly,
        condition: None,
    })
}

use num_complex::Complex64;
use serde::Serialize;

use super::{grid_infimum, DiscGrid};
use crate::error::{LabError, Result};
use crate::outerlab::is_outer;
use crate::polyrat::Poly;
use crate::spaces::{algebra_norm, Space};

const DOMINATION_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaLambda {
    pub value: f64,
    pub bound: f64,
    pub location: Complex64,
    pub grid_error: f64,
    /// `value >= bound - grid_error`.
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaLambdaOuter {
    pub value: f64,
    pub bound: f64,
    pub c_eps: f64,
    pub location: Complex64,
    pub grid_error: f64,
    pub holds: bool,
}

/// `inf (|1 - λ g| + |f|)` for `|g| <= |f|`, against `min(1/2, 1/(2|λ|))`.
pub fn delta_lambda_dominated(f: &Poly, g: &Poly, lambda: Complex64, grid: DiscGrid) -> Result<DeltaLambda> {
    grid.validate()?;
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(LabError::InvalidInput("lambda must be nonzero".into()));
    }
    for z in grid.nodes(true) {
        let (ga, fa) = (g.eval(z).norm(), f.eval(z).norm());
        if ga > fa + DOMINATION_SLACK * fa.max(1.0) {
            return Err(LabError::Domination { witness: z, g_abs: ga, f_abs: fa });
        }
    }
    let (value, location) = grid_infimum(&grid, true, |z| Ok((1.0 - lambda * g.eval(z)).norm() + f.eval(z).norm()))?;
    let bound = 0.5f64.min(0.5 / lambda.norm());
    let grid_error = (lambda.norm() * g.derivative_bound() + f.derivative_bound()) * grid.covering_radius();
    Ok(DeltaLambda {
        value,
        bound,
        location,
        grid_error,
        holds: value >= bound - grid_error,
    })
}

/// `inf (|λ - z| + |f(z)|)` for outer `f`, against
/// `min(c_ε exp(-ε/(1-|λ|)), |1-|λ||/2)` where `c_ε` is the grid infimum of
/// `|f(z)| exp(ε / (2(1-|z|)))`.
pub fn delta_lambda_outer(f: &Poly, lambda: Complex64, eps: f64, grid: DiscGrid) -> Result<DeltaLambdaOuter> {
    grid.validate()?;
    if !(eps > 0.0) {
        return Err(LabError::InvalidInput("epsilon must be positive".into()));
    }
    if (lambda.norm() - 1.0).abs() < 1e-12 {
        return Err(LabError::UnimodularLambda { lambda });
    }
    if !is_outer(f)? {
        return Err(LabError::NotOuter("f has zeros in the open disc".into()));
    }
    // the weight blows up at the circle, so work with logarithms
    let (log_c, _) = grid_infimum(&grid, false, |z| {
        Ok(f.eval(z).norm().ln() + eps / (2.0 * (1.0 - z.norm())))
    })?;
    let c_eps = log_c.exp();
    let gap = 1.0 - lambda.norm();
    let bound = (log_c - eps / gap).exp().min(gap.abs() / 2.0);
    let (value, location) = grid_infimum(&grid, true, |z| Ok((lambda - z).norm() + f.eval(z).norm()))?;
    let grid_error = (1.0 + f.derivative_bound()) * grid.covering_radius();
    Ok(DeltaLambdaOuter {
        value,
        bound,
        c_eps,
        location,
        grid_error,
        holds: value >= bound - grid_error,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogDominance {
    pub holds: bool,
    pub witness: Option<Complex64>,
    pub f_norm: f64,
    /// Nodes with `|f(z)| >= ||f||`, where the condition is void.
    pub skipped: usize,
}

/// `Re g >= 0` and `|g| <= (log(||f|| / |f|))^{-γ}` on the grid, with `||f||`
/// the algebra norm of `space`.
pub fn log_dominance_check(f: &Poly, g: &Poly, gamma: f64, space: &Space, grid: DiscGrid) -> Result<LogDominance> {
    let f_norm = algebra_norm(space, f)?;
    log_dominance_check_with_norm(f, g, gamma, f_norm, grid)
}

pub fn log_dominance_check_with_norm(
    f: &Poly,
    g: &Poly,
    gamma: f64,
    f_norm: f64,
    grid: DiscGrid,
) -> Result<LogDominance> {
    grid.validate()?;
    if f.is_zero() {
        return Err(LabError::InvalidInput("f vanishes identically".into()));
    }
    if !(gamma > 1.0) {
        return Err(LabError::InvalidInput("gamma must exceed 1".into()));
    }
    let tol = 1e-12;
    let mut skipped = 0;
    for z in grid.nodes(false) {
        let gz = g.eval(z);
        if gz.re < -tol {
            return Ok(LogDominance { holds: false, witness: Some(z), f_norm, skipped });
        }
        let fa = f.eval(z).norm();
        if fa >= f_norm {
            skipped += 1;
            continue;
        }
        let threshold = (f_norm / fa).ln().powf(-gamma);
        if gz.norm() > threshold * (1.0 + tol) + tol {
            return Ok(LogDominance { holds: false, witness: Some(z), f_norm, skipped });
        }
    }
    Ok(LogDominance { holds: true, witness: None, f_norm, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dominated_examples() {
        let g = DiscGrid::default();
        let r = delta_lambda_dominated(&Poly::from_real(&[2.0]), &Poly::one(), c(1.0), g).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12 && r.holds);
        let f = Poly::from_real(&[1.0, -1.0]);
        let r = delta_lambda_dominated(&f, &f.scale(c(0.5)), c(2.0), g).unwrap();
        assert!(r.holds && (r.bound - 0.25).abs() < 1e-15);
        let r = delta_lambda_dominated(&f, &f, c(1.0), g).unwrap();
        assert!(r.value >= 1.0 - 1e-9);
    }

    #[test]
    fn domination_violation_has_witness() {
        let e = delta_lambda_dominated(&Poly::monomial(1), &Poly::one(), c(1.0), DiscGrid::default());
        assert!(matches!(e, Err(LabError::Domination { .. })));
    }

    #[test]
    fn outer_examples() {
        let g = DiscGrid::default();
        let r = delta_lambda_outer(&Poly::from_real(&[1.0, -1.0]), c(0.0), 0.5, g).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9 && r.holds);
        let r = delta_lambda_outer(&Poly::from_real(&[2.0]), c(0.3), 0.5, g).unwrap();
        assert!(r.value >= 2.0 && r.holds);
        let r = delta_lambda_outer(&Poly::from_real(&[1.0, -2.0, 1.0]), c(1.5), 0.5, g).unwrap();
        assert!(r.holds);
        assert!(matches!(
            delta_lambda_outer(&Poly::one(), Complex64::new(0.0, 1.0), 0.5, g),
            Err(LabError::UnimodularLambda { .. })
        ));
        assert!(matches!(
            delta_lambda_outer(&Poly::from_real(&[0.5, 1.0]), c(0.0), 0.5, g),
            Err(LabError::NotOuter(_))
        ));
    }

    #[test]
    fn log_dominance_examples() {
        let g = DiscGrid { radii: 24, angles: 64 };
        let f = Poly::from_real(&[0.5, -0.5]);
        assert!(log_dominance_check(&f, &Poly::zero(), 2.0, &Space::hardy(), g).unwrap().holds);
        let r = log_dominance_check_with_norm(&Poly::one(), &Poly::one(), 2.0, std::f64::consts::E, g).unwrap();
        assert!(r.holds);
        let r = log_dominance_check(&f, &Poly::from_real(&[-0.1]), 2.0, &Space::hardy(), g).unwrap();
        assert!(!r.holds && r.witness.is_some());
    }
}

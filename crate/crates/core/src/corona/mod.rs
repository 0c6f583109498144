//! Bézout equations `f1 g1 + f2 g2 = 1`, corona data `δ = inf (|f1| + |f2|)`,
//! and the auxiliary infima `δ_λ` used in the cyclicity arguments.

mod bezout;
mod delta;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::polyrat::{roots, DiscFunction, Poly};

pub use bezout::{bezout_ls, exponent_sweep, BezoutSolution, CoronaFamily, ExponentFit, SweepRow, BEZOUT_ACCEPT};
pub use delta::{
    delta_lambda_dominated, delta_lambda_outer, log_dominance_check, log_dominance_check_with_norm, DeltaLambda,
    DeltaLambdaOuter, LogDominance,
};

/// Polar sampling grid of the closed disc. Radii are
/// `sin(k π / (2 (R-1)))`, which cluster toward the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscGrid {
    pub radii: usize,
    pub angles: usize,
}

impl Default for DiscGrid {
    fn default() -> Self {
        DiscGrid { radii: 96, angles: 512 }
    }
}

impl DiscGrid {
    pub fn radius(&self, k: usize) -> f64 {
        (k as f64 * PI / (2.0 * (self.radii - 1) as f64)).sin()
    }

    /// Largest distance from a point of the disc to the nearest node.
    pub fn covering_radius(&self) -> f64 {
        let dr = (1..self.radii)
            .map(|k| self.radius(k) - self.radius(k - 1))
            .fold(0.0, f64::max);
        ((dr / 2.0).powi(2) + (PI / self.angles as f64).powi(2)).sqrt()
    }

    fn validate(&self) -> Result<()> {
        if self.radii < 2 || self.angles < 1 {
            return Err(LabError::InvalidInput("grid needs at least 2 radii and 1 angle".into()));
        }
        Ok(())
    }

    /// Nodes with `|z| <= r_max`; the circle is included when `closed`.
    pub fn nodes(&self, closed: bool) -> Vec<Complex64> {
        let last = if closed { self.radii } else { self.radii - 1 };
        let mut out = vec![Complex64::new(0.0, 0.0)];
        for k in 1..last {
            let r = self.radius(k);
            for j in 0..self.angles {
                out.push(Complex64::from_polar(r, 2.0 * PI * j as f64 / self.angles as f64));
            }
        }
        out
    }
}

/// Grid minimum of `f` followed by a compass search around the minimizer.
pub(crate) fn grid_infimum<F>(grid: &DiscGrid, closed: bool, f: F) -> Result<(f64, Complex64)>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    for z in grid.nodes(closed) {
        let v = f(z)?;
        if v < best.0 {
            best = (v, z);
        }
    }
    let clamp = |z: Complex64| -> Complex64 {
        let r = z.norm();
        let cap = if closed { 1.0 } else { 1.0 - 1e-12 };
        if r > cap { z * (cap / r) } else { z }
    };
    let (mut value, mut z) = best;
    let mut h = grid.covering_radius();
    let dirs: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(1.0, k as f64 * PI / 4.0)).collect();
    let mut iterations = 0;
    while h > 1e-12 && iterations < 2000 {
        iterations += 1;
        let mut moved = false;
        for d in &dirs {
            let cand = clamp(z + d * h);
            let v = f(cand)?;
            if v < value {
                value = v;
                z = cand;
                moved = true;
                break;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    Ok((value, z))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaInf {
    pub value: f64,
    pub location: Complex64,
    /// Lipschitz bound times the grid covering radius.
    pub grid_error: f64,
    pub grid: DiscGrid,
}

/// `inf_{|z| <= 1} (|f1(z)| + |f2(z)|)`.
pub fn delta_inf(f1: &dyn DiscFunction, f2: &dyn DiscFunction, grid: DiscGrid) -> Result<DeltaInf> {
    grid.validate()?;
    f1.check_closed_disc()?;
    f2.check_closed_disc()?;
    let (value, location) = grid_infimum(&grid, true, |z| Ok(f1.value(z)?.norm() + f2.value(z)?.norm()))?;
    let grid_error = (f1.lipschitz()? + f2.lipschitz()?) * grid.covering_radius();
    Ok(DeltaInf { value, location, grid_error, grid })
}

/// A pair of polynomials without common zeros on the closed disc.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoronaInstance {
    pub f1: Poly,
    pub f2: Poly,
    pub delta: f64,
    pub upper: f64,
    pub delta_location: Complex64,
    pub grid_error: f64,
}

impl CoronaInstance {
    pub fn new(f1: Poly, f2: Poly, grid: DiscGrid) -> Result<Self> {
        if f1.is_zero() && f2.is_zero() {
            return Err(LabError::Precondition("f1 and f2 both vanish identically".into()));
        }
        let (a, b) = if f1.is_zero() { (&f2, &f1) } else { (&f1, &f2) };
        for r in roots(a)? {
            if r.value.norm() <= 1.0 + 1e-9 && b.eval(r.value).norm() <= 1e-9 * b.eval_scale(r.value).max(1.0) {
                return Err(LabError::Precondition(format!("common zero at {} in the closed disc", r.value)));
            }
        }
        let d = delta_inf(&f1, &f2, grid)?;
        if !(d.value > 0.0) {
            return Err(LabError::Precondition("delta vanishes".into()));
        }
        let n = 4096.max(64 * f1.len().max(f2.len()));
        let upper = (0..n)
            .map(|j| {
                let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
                f1.eval(z).norm() + f2.eval(z).norm()
            })
            .fold(0.0, f64::max);
        Ok(CoronaInstance {
            f1,
            f2,
            delta: d.value,
            upper,
            delta_location: d.location,
            grid_error: d.grid_error,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn delta_examples() {
        let g = DiscGrid::default();
        let z = Poly::monomial(1);
        let d = delta_inf(&z, &Poly::constant(c(0.5)), g).unwrap();
        assert!((d.value - 0.5).abs() < 1e-12);
        let d = delta_inf(&z, &Poly::from_real(&[1.0, -1.0]), g).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
        let d = delta_inf(&Poly::from_real(&[-0.5, 1.0]), &Poly::constant(c(0.3)), g).unwrap();
        assert!((d.value - 0.3).abs() < 1e-10, "{}", d.value);
    }

    #[test]
    fn common_zero_rejected() {
        let f = Poly::from_real(&[-1.0, 1.0]);
        assert!(matches!(
            CoronaInstance::new(f.clone(), f, DiscGrid::default()),
            Err(LabError::Precondition(_))
        ));
    }

    #[test]
    fn refinement_stays_within_grid_error() {
        let f1 = Poly::from_real(&[0.3, -1.2, 0.5]);
        let f2 = Poly::from_real(&[0.1, 0.0, 0.4]);
        let coarse = delta_inf(&f1, &f2, DiscGrid { radii: 24, angles: 64 }).unwrap();
        let fine = delta_inf(&f1, &f2, DiscGrid::default()).unwrap();
        assert!(coarse.value - fine.value <= coarse.grid_error);
    }
}

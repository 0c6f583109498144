use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::MeasureAtoms;
use crate::error::{LabError, Result};
use crate::polyrat::Poly;
use crate::quadrature::gauss_legendre;

/// Local Dirichlet integral `D_z(g)`, the squared `H^2` norm of the
/// difference quotient `(g - g(z)) / (· - z)`.
pub fn local_dirichlet(g: &Poly, z: Complex64) -> f64 {
    g.synth_div(z).0.l2_norm_sq()
}

/// The potential `U_μ(z)` weighting `|f'|^2` in the `D(μ)` norm.
pub fn u_mu(atoms: &MeasureAtoms, z: Complex64) -> Result<f64> {
    if z.norm() >= 1.0 {
        return Err(LabError::InvalidInput(format!("U_mu needs |z| < 1, got {z}")));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut s = 0.0;
    for a in atoms.atoms() {
        let w = a.location;
        if a.on_circle() {
            s += a.weight * (1.0 - z.norm_sqr()) / (w - z).norm_sqr();
        } else {
            let d = (z - w).norm();
            if d < 1e-12 {
                return Err(LabError::Singularity { z: w });
            }
            let ratio = (one - w.conj() * z).norm_sqr() / (d * d);
            s += a.weight * ratio.ln() / (1.0 - w.norm_sqr());
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyIdentity {
    /// `∫ |g'|^2 U_μ dA` by quadrature.
    pub lhs: f64,
    /// `Σ w_i D_{ζ_i}(g)`, exact.
    pub rhs: f64,
    pub relative_gap: f64,
    pub warnings: Vec<String>,
}

const RADIAL_NODES: usize = 64;
const MAX_ANGULAR: usize = 1 << 22;

/// Distance in `r` to the nearest singular feature of `U_μ` on the ring `|z| = r`.
fn ring_distance(atoms: &MeasureAtoms, r: f64) -> f64 {
    atoms
        .atoms()
        .iter()
        .map(|a| if a.on_circle() { 1.0 - r } else { (r - a.location.norm()).abs() })
        .fold(f64::INFINITY, f64::min)
}

fn ring_average(atoms: &MeasureAtoms, dg: &Poly, r: f64, base: usize) -> Result<f64> {
    let dist = ring_distance(atoms, r).max(1e-300);
    let want = (48.0 / dist).ceil().min(MAX_ANGULAR as f64) as usize;
    let m = base.max(want).next_power_of_two().min(MAX_ANGULAR);
    let mut s = 0.0;
    for j in 0..m {
        // half-step offset keeps nodes off the atom's own angle
        let z = Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / m as f64);
        s += dg.eval(z).norm_sqr() * u_mu(atoms, z)?;
    }
    Ok(s / m as f64)
}

fn lhs_integral(atoms: &MeasureAtoms, dg: &Poly, nodes: usize) -> Result<f64> {
    let mut breaks = vec![0.0, 1.0];
    for a in atoms.atoms() {
        let r = a.location.norm();
        if !a.on_circle() && r > 0.0 {
            breaks.push(r);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let base = 256.max(8 * dg.len());
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (x, wt) = gauss_legendre(nodes, w[0], w[1]);
        for (r, wr) in x.iter().zip(&wt) {
            // dA = 2r dr dθ/(2π)
            total += wr * 2.0 * r * ring_average(atoms, dg, *r, base)?;
        }
    }
    Ok(total)
}

/// Compares `∫_D |g'|^2 U_μ dA` (quadrature) with `∫ D_z(g) dμ(z)` (exact).
pub fn energy_identity_check(atoms: &MeasureAtoms, g: &Poly) -> Result<EnergyIdentity> {
    let rhs: f64 = atoms
        .atoms()
        .iter()
        .map(|a| a.weight * local_dirichlet(g, a.location))
        .sum();
    let dg = g.derivative();
    if dg.is_zero() {
        return Ok(EnergyIdentity { lhs: 0.0, rhs, relative_gap: 0.0, warnings: Vec::new() });
    }
    let coarse = lhs_integral(atoms, &dg, RADIAL_NODES / 2)?;
    let lhs = lhs_integral(atoms, &dg, RADIAL_NODES)?;
    let mut warnings = Vec::new();
    let change = (lhs - coarse).abs() / lhs.abs().max(f64::MIN_POSITIVE);
    if change > 1e-6 {
        warnings.push(format!("quadrature changed by {change:e} under radial node doubling"));
    }
    let relative_gap = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    Ok(EnergyIdentity { lhs, rhs, relative_gap, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Atom;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn local_dirichlet_examples() {
        assert_eq!(local_dirichlet(&Poly::monomial(7), c(1.0, 0.0)), 7.0);
        assert_eq!(local_dirichlet(&Poly::constant(c(3.0, 1.0)), c(0.2, 0.0)), 0.0);
        assert_eq!(local_dirichlet(&Poly::monomial(2), c(0.0, 0.0)), 1.0);
    }

    #[test]
    fn u_mu_examples() {
        let one = MeasureAtoms::dirac(c(1.0, 0.0)).unwrap();
        assert!((u_mu(&one, c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((u_mu(&one, c(0.5, 0.0)).unwrap() - 3.0).abs() < 1e-14);
        let inner = MeasureAtoms::new(vec![Atom { location: c(0.0, 0.0), weight: 0.5 }]).unwrap();
        assert!((u_mu(&inner, c(0.5, 0.0)).unwrap() - 0.5 * 4f64.ln()).abs() < 1e-15);
        assert!(matches!(u_mu(&inner, c(0.0, 0.0)), Err(LabError::Singularity { .. })));
    }

    #[test]
    fn energy_identity_examples() {
        let one = MeasureAtoms::dirac(c(1.0, 0.0)).unwrap();
        let e = energy_identity_check(&one, &Poly::monomial(1)).unwrap();
        assert_eq!(e.rhs, 1.0);
        assert!(e.relative_gap < 1e-6, "{e:?}");
        let e = energy_identity_check(&one, &Poly::monomial(2)).unwrap();
        assert_eq!(e.rhs, 2.0);
        assert!(e.relative_gap < 1e-4, "{e:?}");
        let e = energy_identity_check(&one, &Poly::constant(c(2.0, 0.0))).unwrap();
        assert_eq!((e.lhs, e.rhs), (0.0, 0.0));
    }

    #[test]
    fn energy_identity_mixed_atoms() {
        let atoms = MeasureAtoms::new(vec![
            Atom { location: c(0.0, 1.0), weight: 0.7 },
            Atom { location: c(0.3, -0.4), weight: 1.3 },
            Atom { location: c(0.0, 0.0), weight: 0.2 },
        ])
        .unwrap();
        let g = Poly::new(vec![c(1.0, 0.0), c(-0.5, 0.2), c(0.0, 0.3), c(0.25, 0.0), c(0.1, -0.1)]);
        let e = energy_identity_check(&atoms, &g).unwrap();
        assert!(e.relative_gap < 1e-6, "{e:?}");
    }
}

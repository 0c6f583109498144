//! Polynomial roots via companion-matrix eigenvalues.
//!
//! Eigenvalues of the (scaled) companion matrix are computed with a complex
//! Schur decomposition. Multiple roots come back as rings of radius
//! ~eps^(1/m); those rings are clustered, replaced by their centroid, and
//! polished with Newton's method on `p^(m-1)`. A cluster is only accepted if
//! `p` vanishes at the polished centre to rounding level, so nearby distinct
//! roots are not merged.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::error::{LabError, Result};

/// Relative radius under which raw eigenvalues are considered one cluster.
pub const CLUSTER_TOL: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// All roots of `p` with multiplicities. The zero polynomial and constants
/// have no roots.
pub fn roots(p: &Poly) -> Result<Vec<Root>> {
    let p = p.trim(1e-15);
    let Some(deg) = p.degree() else {
        return Ok(Vec::new());
    };
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead_zeros = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = Poly::new(p.coeffs()[lead_zeros..].to_vec());
    let mut out = Vec::new();
    if lead_zeros > 0 {
        out.push(Root {
            value: Complex64::new(0.0, 0.0),
            multiplicity: lead_zeros,
        });
    }
    let raw = companion_eigenvalues(&reduced)?;
    out.extend(cluster_and_polish(&reduced, &raw));
    out.sort_by(|a, b| {
        a.value
            .arg()
            .partial_cmp(&b.value.arg())
            .unwrap()
            .then(a.value.norm().partial_cmp(&b.value.norm()).unwrap())
    });
    Ok(out)
}

/// Flat list of roots repeated by multiplicity.
pub fn root_values(p: &Poly) -> Result<Vec<Complex64>> {
    Ok(roots(p)?
        .into_iter()
        .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
        .collect())
}

/// Eigenvalues of the companion matrix of `p` (nonzero constant term).
fn companion_eigenvalues(p: &Poly) -> Result<Vec<Complex64>> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Ok(Vec::new());
    }
    let c = p.coeffs();
    if d == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }
    // substitute z = s w so that the scaled polynomial has |c0| = |cd|
    let s = (c[0].norm() / c[d].norm()).powf(1.0 / d as f64);
    let s = if s.is_finite() && s > 0.0 { s } else { 1.0 };
    // symmetric root configurations can stall the shifted QR iteration;
    // rotating the variable breaks the symmetry
    for phi in [0.0, 0.377_964_473, 1.234_567_89, std::f64::consts::E] {
        let rot = Complex64::from_polar(s, phi);
        let lead = c[d] * rot.powi(d as i32);
        let monic: Vec<Complex64> = (0..d).map(|k| c[k] * rot.powi(k as i32) / lead).collect();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..d {
            m[(i, d - 1)] = -monic[i];
        }
        if let Some(eig) = m.try_schur(1e-15, 10_000).and_then(|t| t.eigenvalues()) {
            return Ok(eig.iter().map(|&w| w * rot).collect());
        }
    }
    Err(LabError::FactorizationFailure(
        "Schur iteration failed on the companion matrix".into(),
    ))
}

fn newton_polish(p: &Poly, dp: &Poly, mut z: Complex64, steps: usize) -> Complex64 {
    let mut best = p.eval(z).norm();
    for _ in 0..steps {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval(z) / d;
        let val = p.eval(cand).norm();
        if !(val < best) {
            break;
        }
        best = val;
        z = cand;
    }
    z
}

fn vanishes_at(p: &Poly, z: Complex64) -> bool {
    let d = p.degree().unwrap_or(0).max(1) as f64;
    p.eval(z).norm() <= 100.0 * d * f64::EPSILON * p.eval_scale(z)
}

fn cluster_and_polish(p: &Poly, raw: &[Complex64]) -> Vec<Root> {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = raw[i].norm().max(raw[j].norm()).max(1.0);
            if (raw[i] - raw[j]).norm() <= CLUSTER_TOL * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index_of[r] == usize::MAX {
            index_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index_of[r]].push(i);
    }

    let dp = p.derivative();
    let mut out = Vec::new();
    for g in groups {
        if g.len() == 1 {
            out.push(Root {
                value: newton_polish(p, &dp, raw[g[0]], 3),
                multiplicity: 1,
            });
            continue;
        }
        let m = g.len();
        let centroid = g.iter().map(|&i| raw[i]).sum::<Complex64>() / m as f64;
        let radius = g
            .iter()
            .map(|&i| (raw[i] - centroid).norm())
            .fold(0.0, f64::max);
        let dm1 = p.nth_derivative(m - 1);
        let dm = dm1.derivative();
        let mut c = centroid;
        for _ in 0..8 {
            let d = dm.eval(c);
            if d.norm() == 0.0 {
                break;
            }
            let step = dm1.eval(c) / d;
            let cand = c - step;
            if (cand - centroid).norm() > 2.0 * radius + 1e-12 {
                break;
            }
            if !(dm1.eval(cand).norm() < dm1.eval(c).norm()) {
                break;
            }
            c = cand;
        }
        if vanishes_at(p, c) {
            out.push(Root {
                value: c,
                multiplicity: m,
            });
        } else {
            for &i in &g {
                out.push(Root {
                    value: newton_polish(p, &dp, raw[i], 3),
                    multiplicity: 1,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simple_roots() {
        let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|r| r.multiplicity == 1));
        assert!(r.iter().any(|r| (r.value - c(1.0, 0.0)).norm() < 1e-14));
        assert!(r.iter().any(|r| (r.value - c(-1.0, 0.0)).norm() < 1e-14));
    }

    #[test]
    fn multiple_roots_are_clustered() {
        for m in 2..=6usize {
            let zeta = Complex64::from_polar(1.0, 0.7);
            let mut rts = vec![zeta; m];
            rts.push(c(2.0, 1.0));
            let p = Poly::from_roots(&rts, c(0.3, 0.0));
            let r = roots(&p).unwrap();
            let on = r.iter().find(|r| r.multiplicity == m).expect("cluster");
            assert!((on.value - zeta).norm() < 1e-10, "m={m}: {:?}", on.value);
        }
    }

    #[test]
    fn close_distinct_roots_are_not_merged() {
        let p = Poly::from_roots(&[c(0.5, 0.0), c(0.503, 0.0)], c(1.0, 0.0));
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|r| (r.value - c(0.5, 0.0)).norm() < 1e-12));
        assert!(r.iter().any(|r| (r.value - c(0.503, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn zero_roots() {
        let p = Poly::from_real(&[0.0, 0.0, 1.0, 1.0]);
        let r = roots(&p).unwrap();
        let zero = r.iter().find(|r| r.value.norm() == 0.0).unwrap();
        assert_eq!(zero.multiplicity, 2);
    }
}

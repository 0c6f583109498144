use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclicity_lab::approximants::{bpe_estimate, cyclicity_scan, opa, Verdict};
use cyclicity_lab::cli::suite::{coprime_pairs, symbol_family};
use cyclicity_lab::corona::{delta_inf, DiscGrid};
use cyclicity_lab::outerlab::{e0_membership, outer_from_modulus, BoundaryModulus};
use cyclicity_lab::polyrat::{mate, Poly, Rat};
use cyclicity_lab::quadrature::QuadratureSpec;
use cyclicity_lab::spaces::{monomial_gram, norm, MeasureAtoms, Space};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn half_z() -> Space {
    Space::de_branges_rovnyak(Rat::from(Poly::from_real(&[0.0, 0.5]))).unwrap()
}

#[test]
fn small_symbol_gram_is_equivalent_to_hardy() {
    let upper = 1.0 + 4.0 / 3.0 + 1e-9;
    for n_max in [8, 32, 128] {
        let eig = monomial_gram(&half_z(), n_max).unwrap().eigenvalues();
        let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().cloned().fold(0.0, f64::max);
        assert!(lo >= 1.0 - 1e-9 && hi <= upper, "n_max {n_max}: [{lo}, {hi}]");
    }
}

#[test]
fn distances_in_equivalent_norms_stay_comparable() {
    let hb = half_z();
    let h2 = Space::hardy();
    let k = (1.0f64 + 4.0 / 3.0).sqrt();
    for f in [Poly::from_real(&[1.0, -1.0]), Poly::from_real(&[1.0, -2.0, 1.0]), Poly::from_real(&[1.0, 0.5])] {
        for n in [0, 1, 2, 4, 8, 16, 32, 64] {
            let (d_hb, d_h2) = (opa(&hb, &f, n).unwrap().distance, opa(&h2, &f, n).unwrap().distance);
            if d_h2 < 1e-12 {
                // both distances are at roundoff level
                continue;
            }
            let ratio = d_hb / d_h2;
            assert!(ratio >= 1.0 - 1e-9 && ratio <= k + 1e-9, "degree {n}: ratio {ratio}");
        }
    }
}

#[test]
fn besov_norms_survive_node_doubling() {
    let tests = [
        Poly::from_real(&[1.0, -1.0]),
        Poly::from_real(&[0.3, 0.0, 0.0, 1.0, -0.5]),
        Poly::new((0..12).map(|k| c(1.0 / (k + 1) as f64, 0.2 * k as f64 - 1.0)).collect()),
    ];
    for (p, alpha) in [(1.5, 0.0), (3.0, 0.5), (4.0, 1.5), (2.5, -0.5)] {
        let base = Space::besov_dirichlet(p, alpha).unwrap();
        let q = base.quadrature();
        let fine = base.clone().with_quadrature(QuadratureSpec {
            radial_nodes: 2 * q.radial_nodes,
            angular_nodes: 2 * q.angular_nodes,
        });
        for f in &tests {
            let (a, b) = (norm(&base, f).unwrap(), norm(&fine, f).unwrap());
            assert!((a - b).abs() <= 1e-6 * b, "p {p} alpha {alpha}: {a} vs {b}");
        }
    }
}

#[test]
fn products_of_decaying_functions_decay() {
    let spaces = [
        Space::hardy(),
        Space::weighted_dirichlet(0.0).unwrap(),
        Space::weighted_dirichlet(0.5).unwrap(),
        Space::harmonic_dirichlet(MeasureAtoms::dirac(c(1.0, 0.0)).unwrap()).unwrap(),
    ];
    let pairs = [
        (Poly::from_real(&[1.0, -1.0]), Poly::from_real(&[1.0, 1.0])),
        (Poly::from_real(&[1.0, -1.0]), Poly::from_real(&[2.0, 1.0])),
        (Poly::new(vec![c(1.0, 0.0), c(0.0, -1.0)]), Poly::from_real(&[1.0, 0.0, -0.5])),
    ];
    let mut compared = 0;
    for s in &spaces {
        for (f, phi) in &pairs {
            let vf = cyclicity_scan(s, f, 64, None).unwrap().verdict;
            let vp = cyclicity_scan(s, phi, 64, None).unwrap().verdict;
            if vf == Verdict::Decaying && vp == Verdict::Decaying {
                compared += 1;
                let v = cyclicity_scan(s, &(f * phi), 64, None).unwrap().verdict;
                assert_eq!(v, Verdict::Decaying, "{} with {:?} * {:?}", s.label(), f, phi);
            }
        }
    }
    assert!(compared >= 4);
}

#[test]
fn refining_the_grid_moves_the_infimum_within_its_error() {
    for (f1, f2) in coprime_pairs() {
        let coarse = delta_inf(&f1, &f2, DiscGrid { radii: 33, angles: 128 }).unwrap();
        let fine = delta_inf(&f1, &f2, DiscGrid { radii: 65, angles: 256 }).unwrap();
        assert!(fine.value <= coarse.value + coarse.grid_error);
        assert!(fine.value >= coarse.value - coarse.grid_error - fine.grid_error);
    }
}

#[test]
fn outer_function_recovers_zero_free_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..12 {
        let deg = rng.gen_range(1..=8);
        let roots: Vec<Complex64> = (0..deg)
            .map(|_| Complex64::from_polar(rng.gen_range(1.05..3.0), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let f = Poly::from_roots(&roots, c(1.0, 0.0));
        let f = f.scale(f.eval(c(0.0, 0.0)).conj() / f.eval(c(0.0, 0.0)).norm());
        let m = BoundaryModulus::from_poly(&f, 1 << 16).unwrap();
        for _ in 0..32 {
            let z = Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..2.0 * PI));
            let (got, want) = (outer_from_modulus(&m, z).unwrap().value, f.eval(z));
            assert!((got - want).norm() <= 1e-5 * want.norm(), "{got} vs {want}");
        }
    }
}

#[test]
fn boundary_membership_decides_point_evaluation() {
    let zetas = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), Complex64::from_polar(1.0, 0.7)];
    for b in symbol_family().unwrap() {
        let space = Space::de_branges_rovnyak(b.clone()).unwrap();
        for &zeta in &zetas {
            let member = e0_membership(&b, zeta).unwrap().member;
            let v = bpe_estimate(&space, zeta, 512).unwrap();
            assert_eq!(member, v.bounded_flag, "b = {b:?} at {zeta}: v_512 = {}", v.values[512]);
        }
    }
}

#[test]
fn mate_series_growth_respects_the_multiplicity_exponent() {
    for b in symbol_family().unwrap() {
        let m = mate(&b, 1040).unwrap();
        let mut acc = 0.0;
        let sums: Vec<f64> = m.c.iter().map(|v| {
            acc += v.norm_sqr();
            acc
        }).collect();
        let pts: Vec<(f64, f64)> = (16..=1024).step_by(8).map(|n| ((n as f64).ln(), sums[n].ln())).collect();
        let k = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!(slope <= (2 * m.n + 1) as f64 + 0.1, "N = {}: slope {slope}", m.n);
        if m.n == 1 && b == Rat::from(Poly::from_real(&[0.5, 0.5])) {
            assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
        }
    }
}

#[test]
fn hb_diagonal_matches_series_partial_sums() {
    for b in symbol_family().unwrap() {
        let m = mate(&b, 80).unwrap();
        let g = monomial_gram(&Space::de_branges_rovnyak(b).unwrap(), 64).unwrap();
        let mut acc = 1.0;
        for (n, d) in g.diagonal().iter().enumerate() {
            acc += m.c[n].norm_sqr();
            assert!((d - acc).abs() <= 1e-9 * acc);
        }
    }
}

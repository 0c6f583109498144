//! Curated experiment suites with a pass/fail row per criterion.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approximants::{bpe_estimate, cyclicity_scan, opa, Verdict};
use crate::corona::{
    bezout_ls, delta_lambda_dominated, delta_lambda_outer, exponent_sweep, CoronaFamily, CoronaInstance, DiscGrid,
};
use crate::error::{LabError, Result};
use crate::growth::{monomial_growth, power_sum_inequality, resolvent_bound_check};
use crate::outerlab::e0_membership;
use crate::polyrat::{fejer_riesz, mate, Poly, Rat, TrigPoly};
use crate::spaces::{
    energy_identity_check, monomial_gram, monomial_gram_matrix, monomial_norm_sq, Atom, MeasureAtoms, Space,
};

pub const SUITES: &[(&str, &str)] = &[
    ("smoke", "mate, identity Gram and one approximant; a few seconds"),
    ("paper-s5", "every acceptance criterion, including the thread-count determinism check"),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteRow {
    pub criterion: u32,
    pub title: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub tolerance_scale: f64,
    pub rows: Vec<SuiteRow>,
    /// Wall time per row, kept out of the payload comparison.
    #[serde(skip)]
    pub seconds: Vec<f64>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Deterministic part of the report.
    pub fn payload(&self) -> String {
        serde_json::to_string(&self.rows).expect("rows serialize")
    }

    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.rows.iter().enumerate() {
            let secs = self.seconds.get(i).copied().unwrap_or(0.0);
            s.push_str(&format!(
                "[{}] {:>2} {:<34} {:>7.2}s  {}\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.criterion,
                r.title,
                secs,
                r.detail
            ));
        }
        s
    }
}

pub fn suite(name: &str, tolerance_scale: f64) -> Result<SuiteReport> {
    if !(tolerance_scale > 0.0 && tolerance_scale.is_finite()) {
        return Err(LabError::InvalidInput("tolerance scale must be positive".into()));
    }
    let rows = match name {
        "smoke" => smoke(tolerance_scale)?,
        "paper-s5" => paper_s5(tolerance_scale)?,
        other => return Err(LabError::UnknownSuite(other.into())),
    };
    let (rows, seconds) = rows.into_iter().unzip();
    Ok(SuiteReport {
        suite: name.into(),
        tolerance_scale,
        rows,
        seconds,
    })
}

type Timed = (SuiteRow, f64);

fn timed(criterion: u32, title: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Result<Timed> {
    let start = Instant::now();
    let (pass, detail) = f()?;
    Ok((
        SuiteRow {
            criterion,
            title: title.into(),
            pass,
            detail,
        },
        start.elapsed().as_secs_f64(),
    ))
}

fn smoke(scale: f64) -> Result<Vec<Timed>> {
    Ok(vec![
        timed(1, "mate of (1+z)/2", || {
            let m = mate(&Rat::from(Poly::from_real(&[0.5, 0.5])), 16)?;
            let err = (m.a.num.coeff(0) - 0.5).norm() + (m.a.num.coeff(1) + 0.5).norm();
            Ok((err < 1e-10 * scale, format!("|a - (1-z)/2| = {err:.2e}")))
        })?,
        timed(2, "Hardy Gram is the identity", || {
            let g = monomial_gram(&Space::hardy(), 16)?;
            let err = (g.entries - DMatrix::identity(17, 17)).iter().map(|v| v.norm()).fold(0.0, f64::max);
            Ok((err == 0.0, format!("max deviation {err:.2e}")))
        })?,
        timed(3, "Hardy approximant of 1-z", || {
            let d = opa(&Space::hardy(), &Poly::from_real(&[1.0, -1.0]), 8)?.distance;
            let err = (d * d - 0.1).abs();
            Ok((err < 1e-12 * scale, format!("d_8^2 = {:.12}", d * d)))
        })?,
    ])
}

/// Criteria 1 to 9 under the current thread pool, then the same rows under
/// one thread and under all available threads for the determinism check.
fn paper_s5(scale: f64) -> Result<Vec<Timed>> {
    let pool = |n: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| LabError::InvalidInput(e.to_string()))
    };
    let many = std::thread::available_parallelism().map_or(2, |n| n.get()).max(2);
    let mut rows = pool(many)?.install(|| criteria(scale))?;
    let start = Instant::now();
    let single = pool(1)?.install(|| criteria(scale))?;
    let a = serde_json::to_string(&rows.iter().map(|r| &r.0).collect::<Vec<_>>()).expect("rows serialize");
    let b = serde_json::to_string(&single.iter().map(|r| &r.0).collect::<Vec<_>>()).expect("rows serialize");
    rows.push((
        SuiteRow {
            criterion: 10,
            title: "determinism across thread counts".into(),
            pass: a == b,
            detail: format!("1 vs {many} threads, {} payload bytes", a.len()),
        },
        start.elapsed().as_secs_f64(),
    ));
    Ok(rows)
}

pub fn criteria(scale: f64) -> Result<Vec<Timed>> {
    Ok(vec![
        timed(1, "mate identity", || mate_identity(scale))?,
        timed(2, "H(b) monomial norms", || hb_norms(scale))?,
        timed(3, "growth bounds", || growth_bounds(scale))?,
        timed(4, "approximant oracle equivalence", || opa_oracle(scale))?,
        timed(5, "bounded point evaluation triangle", || bpe_triangle(scale))?,
        timed(6, "delta_lambda inequalities", || delta_lambda(scale))?,
        timed(7, "corona experiments", || corona(scale))?,
        timed(8, "D(mu) energy identity", || energy(scale))?,
        timed(9, "power sums and resolvent", inequalities)?,
    ])
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Symbols used across criteria, including one whose mate has a double
/// zero at `1`.
pub fn symbol_family() -> Result<Vec<Rat>> {
    let p = Poly::from_real;
    let t = TrigPoly::constant(1.0).sub(&TrigPoly::abs_sq(&p(&[0.25, -0.5, 0.25])));
    Ok(vec![
        Rat::from(p(&[0.5, 0.5])),
        Rat::from(p(&[0.0, 0.5])),
        Rat::from(p(&[0.25, 0.5, 0.25])),
        Rat::from(p(&[0.0, 0.75, 0.25])),
        Rat::from(p(&[0.5, 0.0, 0.5])),
        Rat::new(p(&[0.5, 0.5]), p(&[1.0, 0.2]))?,
        Rat::from(fejer_riesz(&t)?),
    ])
}

fn mate_identity(scale: f64) -> Result<(bool, String)> {
    let n = 4096;
    let mut worst = 0.0f64;
    let mut min_a0 = f64::INFINITY;
    for b in symbol_family()? {
        let m = mate(&b, 64)?;
        for j in 0..n {
            let z = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / n as f64);
            let s = m.a.eval(z)?.norm_sqr() + m.b.eval(z)?.norm_sqr();
            worst = worst.max((s - 1.0).abs());
        }
        let a0 = m.a.eval(c(0.0, 0.0))?;
        min_a0 = min_a0.min(if a0.im.abs() <= 1e-14 { a0.re } else { -1.0 });
    }
    Ok((
        worst <= 1e-9 * scale && min_a0 > 0.0,
        format!("max ||a|^2+|b|^2-1| = {worst:.2e}, min a(0) = {min_a0:.6}"),
    ))
}

fn hb_norms(scale: f64) -> Result<(bool, String)> {
    let s = Space::de_branges_rovnyak(Rat::from(Poly::from_real(&[0.5, 0.5])))?;
    let mut worst = 0.0f64;
    for n in 1..=200 {
        worst = worst.max((monomial_norm_sq(&s, n)? - (4 * n + 2) as f64).abs());
    }
    let mut worst_diag = 0.0f64;
    for b in symbol_family()? {
        let s = Space::de_branges_rovnyak(b)?;
        let sums = s.mate().expect("H(b) has a mate").with_truncation(201)?.c_partial_sums();
        let d = monomial_gram(&s, 200)?.diagonal();
        for n in 0..=200 {
            worst_diag = worst_diag.max((d[n] - 1.0 - sums[n]).abs());
        }
    }
    Ok((
        worst <= 1e-9 * scale && worst_diag <= 1e-9 * scale,
        format!("|norm^2 - (4n+2)| <= {worst:.2e}, diagonal vs 1+sum|c_j|^2 <= {worst_diag:.2e}"),
    ))
}

fn growth_bounds(scale: f64) -> Result<(bool, String)> {
    let tol = -1e-9 * scale;
    let mut margins = Vec::new();
    for (p, a) in [(2.0, 0.0), (2.0, 1.0), (3.0, 1.5)] {
        margins.push(("besov", monomial_growth(&Space::besov_dirichlet(p, a)?, 200)?.bound_margin));
    }
    for b in symbol_family()? {
        let s = Space::de_branges_rovnyak(b)?;
        margins.push(("hb", monomial_growth(&s, 400)?.bound_margin));
    }
    for atoms in measure_family()? {
        margins.push(("dmu", monomial_growth(&Space::harmonic_dirichlet(atoms)?, 200)?.bound_margin));
    }
    let worst = |k: &str| margins.iter().filter(|m| m.0 == k).map(|m| m.1).fold(f64::INFINITY, f64::min);
    let pass = margins.iter().all(|m| m.1 >= tol);
    Ok((
        pass,
        format!(
            "min margins: Besov {:.3e}, H(b) {:.3e}, local Dirichlet {:.3e}",
            worst("besov"),
            worst("hb"),
            worst("dmu")
        ),
    ))
}

/// Measures mixing boundary and interior atoms, at most eight atoms each.
pub fn measure_family() -> Result<Vec<MeasureAtoms>> {
    let atom = |re: f64, im: f64, w: f64| Atom { location: c(re, im), weight: w };
    let u = |t: f64, w: f64| Atom { location: Complex64::from_polar(1.0, t), weight: w };
    Ok(vec![
        MeasureAtoms::dirac(c(1.0, 0.0))?,
        MeasureAtoms::new(vec![u(0.0, 1.0), u(PI / 2.0, 0.5), atom(0.3, 0.2, 0.7)])?,
        MeasureAtoms::new(vec![atom(0.0, 0.0, 1.0), atom(-0.5, 0.5, 0.25), u(2.0, 2.0), u(4.0, 0.1)])?,
        MeasureAtoms::new(
            (0..8)
                .map(|k| {
                    let t = k as f64 * PI / 4.0 + 0.1;
                    if k % 2 == 0 {
                        u(t, 0.2 + 0.1 * k as f64)
                    } else {
                        Atom { location: Complex64::from_polar(0.9, t), weight: 0.3 }
                    }
                })
                .collect(),
        )?,
    ])
}

fn random_poly(rng: &mut ChaCha8Rng, degrees: std::ops::RangeInclusive<usize>) -> Poly {
    let degree = rng.gen_range(degrees);
    loop {
        let p = Poly::new(
            (0..=degree)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        );
        if p.coeff(0).norm() > 0.1 && p.degree() == Some(degree) {
            return p;
        }
    }
}

/// Dense normal-equation solution of `min ||p f - 1||` over `deg p <= n`,
/// solved by LU; returns the distance from the normal-equation identity.
pub fn dense_opa_distance(space: &Space, f: &Poly, n: usize) -> Result<f64> {
    let k = f.len() + n;
    let m = monomial_gram_matrix(space, k)?;
    // coefficients of p f are T x; in conjugated unknowns the problem is
    // min (T̄ w - e0)* M (T̄ w - e0)
    let t = DMatrix::from_fn(k, n + 1, |r, j| if r >= j { f.coeff(r - j).conj() } else { c(0.0, 0.0) });
    let e0 = DVector::from_fn(k, |r, _| if r == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let a = t.adjoint() * &m * &t;
    let rhs = t.adjoint() * &m * &e0;
    let w = a
        .full_piv_lu()
        .solve(&rhs)
        .ok_or(LabError::SingularGram { condition: f64::INFINITY })?;
    let d2 = m[(0, 0)].re - (rhs.adjoint() * w)[(0, 0)].re;
    Ok(d2.max(0.0).sqrt())
}

fn opa_oracle(scale: f64) -> Result<(bool, String)> {
    let spaces = [
        Space::hardy(),
        Space::weighted_dirichlet(0.0)?,
        Space::de_branges_rovnyak(Rat::from(Poly::from_real(&[0.5, 0.5])))?,
        Space::harmonic_dirichlet(MeasureAtoms::dirac(c(1.0, 0.0))?)?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let s = &spaces[i % 4];
        let f = random_poly(&mut rng, 1..=4);
        let n = rng.gen_range(0..=12);
        worst = worst.max((opa(s, &f, n)?.distance - dense_opa_distance(s, &f, n)?).abs());
    }
    let f = Poly::from_real(&[1.0, -1.0]);
    let mut worst_hardy = 0.0f64;
    for n in 0..=50 {
        let d = opa(&spaces[0], &f, n)?.distance;
        let oracle = dense_opa_distance(&spaces[0], &f, n)?;
        worst_hardy = worst_hardy
            .max((d * d - 1.0 / (n + 2) as f64).abs())
            .max((oracle * oracle - 1.0 / (n + 2) as f64).abs());
    }
    Ok((
        worst <= 1e-9 * scale && worst_hardy <= 1e-9 * scale,
        format!("random instances {worst:.2e}, Hardy 1-z vs 1/(n+2) {worst_hardy:.2e}"),
    ))
}

fn bpe_triangle(scale: f64) -> Result<(bool, String)> {
    let one = c(1.0, 0.0);
    let f = Poly::from_real(&[1.0, -1.0]);
    let b = Rat::from(Poly::from_real(&[0.5, 0.5]));
    let hb = Space::de_branges_rovnyak(b.clone())?;
    let member = e0_membership(&b, one)?.member;
    let v = bpe_estimate(&hb, one, 129)?;
    let schedule: Vec<usize> = (0..=128).collect();
    let scan = cyclicity_scan(&hb, &f, 128, Some(&schedule))?;
    let duality = (0..=128)
        .map(|n| scan.distances[n] * v.values[n + 1])
        .fold(f64::INFINITY, f64::min);
    let hardy = Space::hardy();
    let dir = Space::weighted_dirichlet(0.0)?;
    let vh = bpe_estimate(&hardy, one, 512)?;
    let vd = bpe_estimate(&dir, one, 512)?;
    let sh = cyclicity_scan(&hardy, &f, 128, None)?.verdict;
    let sd = cyclicity_scan(&dir, &f, 128, None)?.verdict;
    let pass = member
        && v.bounded_flag
        && scan.verdict == Verdict::Plateau
        && duality >= 1.0 - 1e-9 * scale
        && !vh.bounded_flag
        && vh.values[512] > 10.0
        && !vd.bounded_flag
        && sh == Verdict::Decaying
        && sd == Verdict::Decaying;
    Ok((
        pass,
        format!(
            "H(b): E0 {member}, bounded {}, {:?}, min d_n v_(n+1) = {duality:.12}; Hardy v_512 = {:.3}, {:?}; D v_512 = {:.3}, {:?}",
            v.bounded_flag, scan.verdict, vh.values[512], sh, vd.values[512], sd
        ),
    ))
}

fn delta_lambda(scale: f64) -> Result<(bool, String)> {
    let grid = DiscGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_dom = f64::INFINITY;
    for _ in 0..100 {
        let f = random_poly(&mut rng, 1..=3);
        let h = random_poly(&mut rng, 0..=2);
        let h = h.scale(c(0.999 / h.sup_circle(8192), 0.0));
        let g = &f * &h;
        let lambda = Complex64::from_polar(rng.gen_range(0.1..5.0), rng.gen_range(0.0..2.0 * PI));
        let r = delta_lambda_dominated(&f, &g, lambda, grid)?;
        worst_dom = worst_dom.min(r.value - r.bound);
    }
    let mut outer_ok = 0;
    let mut worst_outer = f64::INFINITY;
    for i in 0..50 {
        let roots: Vec<Complex64> = (0..rng.gen_range(1..=3))
            .map(|k| {
                let r = if (i + k) % 3 == 0 { 1.0 } else { rng.gen_range(1.0..3.0) };
                Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
            })
            .collect();
        let f = Poly::from_roots(&roots, c(rng.gen_range(0.2..2.0), 0.0));
        let modulus = if i % 2 == 0 { rng.gen_range(0.0..0.9) } else { rng.gen_range(1.1..3.0) };
        let lambda = Complex64::from_polar(modulus, rng.gen_range(0.0..2.0 * PI));
        let r = delta_lambda_outer(&f, lambda, rng.gen_range(0.1..1.0), grid)?;
        worst_outer = worst_outer.min(r.value - r.bound + r.grid_error);
        outer_ok += usize::from(r.holds);
    }
    Ok((
        worst_dom >= -1e-4 * scale && outer_ok == 50,
        format!("min(value - bound): dominated {worst_dom:.4e}; outer {outer_ok}/50 hold, min slack {worst_outer:.4e}"),
    ))
}

/// Pairs with well-separated zeros.
pub fn coprime_pairs() -> Vec<(Poly, Poly)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    while out.len() < 10 {
        let mut draw = |k: usize| -> Vec<Complex64> {
            (0..k)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.5), rng.gen_range(0.0..2.0 * PI)))
                .collect()
        };
        let (d1, d2) = (1 + out.len() % 3, 1 + (out.len() / 3) % 3);
        let (r1, r2) = (draw(d1), draw(d2));
        if r1.iter().all(|a| r2.iter().all(|b| (a - b).norm() > 0.3)) {
            out.push((Poly::from_roots(&r1, c(1.0, 0.0)), Poly::from_roots(&r2, c(1.0, 0.0))));
        }
    }
    out
}

/// Eight geometric steps from `0.5` down to `0.5 q`.
pub fn family_params(q: f64) -> Vec<f64> {
    (0..8).map(|k| 0.5 * q.powf(k as f64 / 7.0)).collect()
}

fn corona(scale: f64) -> Result<(bool, String)> {
    let grid = DiscGrid::default();
    let spaces = [Space::hardy(), Space::weighted_dirichlet(0.0)?];
    let mut worst = 0.0f64;
    for (i, (f1, f2)) in coprime_pairs().into_iter().enumerate() {
        let d = f1.degree().unwrap_or(0) + f2.degree().unwrap_or(0);
        let inst = CoronaInstance::new(f1, f2, grid)?;
        worst = worst.max(bezout_ls(&spaces[i % 2], &inst, d)?.residual);
    }
    let schedule = [0, 1, 2, 4, 8];
    let constant = CoronaFamily::Constant { params: family_params(0.02) }.instances(grid)?;
    let fit = exponent_sweep(&spaces[0], &constant, &schedule)?;
    let boundary = CoronaFamily::BoundaryApproach { params: family_params(0.002) }.instances(grid)?;
    let bfit = exponent_sweep(&spaces[0], &boundary, &schedule)?;
    Ok((
        worst < 1e-8 * scale && (fit.fitted_a - 1.0).abs() <= 0.05 * scale,
        format!(
            "max Bezout residual {worst:.2e}; constant family A = {:.4}; boundary family A = {:.4} (fit residual {:.2e}, reported)",
            fit.fitted_a, bfit.fitted_a, bfit.fit_residual
        ),
    ))
}

fn energy(scale: f64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for atoms in measure_family()? {
        for d in [3, 10, 20] {
            let g = random_poly(&mut rng, d..=d);
            worst = worst.max(energy_identity_check(&atoms, &g)?.relative_gap);
        }
    }
    Ok((worst <= 1e-4 * scale, format!("max relative gap {worst:.2e}")))
}

fn inequalities() -> Result<(bool, String)> {
    let xs = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];
    let mut power = 0;
    let mut total = 0;
    for p in 0..=6 {
        for &x in &xs {
            total += 1;
            power += usize::from(power_sum_inequality(p, x)?.holds);
        }
    }
    let hb = |n: usize| ((4 * n + 2) as f64).sqrt();
    let besov = |n: usize| ((1 + n) as f64).sqrt();
    let unit = |_: usize| 1.0;
    let mut resolvent = 0;
    let mut rays = 0;
    for r in [1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0] {
        for k in 0..16 {
            let lambda = Complex64::from_polar(r, 2.0 * PI * k as f64 / 16.0);
            for (seq, p) in [(&hb as &dyn Fn(usize) -> f64, 1), (&besov, 1), (&unit, 0)] {
                rays += 1;
                resolvent += usize::from(resolvent_bound_check(seq, p, lambda)?.holds);
            }
        }
    }
    Ok((
        power == total && resolvent == rays,
        format!("power sums {power}/{total}, resolvent {resolvent}/{rays}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert_eq!(suite("nope", 1.0), Err(LabError::UnknownSuite("nope".into())));
    }

    #[test]
    fn smoke_passes() {
        let r = suite("smoke", 1.0).unwrap();
        assert!(r.all_pass(), "{}", r.summary_table());
    }
}

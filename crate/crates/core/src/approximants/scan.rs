use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{descent::opa_descent, opa, DescentParams};
use crate::error::Result;
use crate::polyrat::Poly;
use crate::spaces::Space;

/// Minimal final distance for a plateau verdict.
pub const PLATEAU_FLOOR: f64 = 1e-3;
/// Maximal relative change over the last doubling window for a plateau.
pub const PLATEAU_TOLERANCE: f64 = 0.01;
/// A plateau fit with log-residual below this wins over decaying models.
const PLATEAU_FIT_RESIDUAL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `c / log n`
    InverseLog,
    /// `c / n^β`
    Power,
    /// `c`
    Plateau,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: FitModel,
    /// `[c]` or `[c, β]`.
    pub params: Vec<f64>,
    /// RMS residual of the fit in log space.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Decaying,
    Plateau,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicityReport {
    pub degrees: Vec<usize>,
    pub distances: Vec<f64>,
    pub decay_fit: Option<DecayFit>,
    pub candidate_fits: Vec<DecayFit>,
    pub verdict: Verdict,
    pub plateau_floor: f64,
    pub plateau_tolerance: f64,
}

impl CyclicityReport {
    pub fn distance_at(&self, n: usize) -> Option<f64> {
        self.degrees.iter().position(|&d| d == n).map(|i| self.distances[i])
    }

    /// CSV with columns `n,d_n`, preceded by `#` comment lines.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W, header: &[String]) -> Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "n,d_n")?;
        for (n, d) in self.degrees.iter().zip(&self.distances) {
            writeln!(out, "{n},{d:e}")?;
        }
        Ok(())
    }
}

/// `0, 1, 2, 4, ...` up to `n_max`, with `n_max` and `n_max / 2` included.
pub fn default_schedule(n_max: usize) -> Vec<usize> {
    let mut s = vec![0];
    let mut k = 1;
    while k <= n_max {
        s.push(k);
        k *= 2;
    }
    s.push(n_max);
    s.push(n_max / 2);
    s.sort_unstable();
    s.dedup();
    s
}

fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

fn rms(r: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = r.collect();
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn fits(degrees: &[usize], distances: &[f64]) -> Vec<DecayFit> {
    let (n, d): (Vec<f64>, Vec<f64>) = degrees
        .iter()
        .zip(distances)
        .filter(|(n, d)| **n >= 2 && **d > 0.0)
        .map(|(n, d)| (*n as f64, *d))
        .unzip();
    if n.len() < 2 {
        return Vec::new();
    }
    let ld: Vec<f64> = d.iter().map(|v| v.ln()).collect();
    let ln: Vec<f64> = n.iter().map(|v| v.ln()).collect();

    let c_plateau = ld.iter().sum::<f64>() / ld.len() as f64;
    let plateau = DecayFit {
        model: FitModel::Plateau,
        params: vec![c_plateau.exp()],
        residual: rms(ld.iter().map(|y| y - c_plateau)),
    };

    let lln: Vec<f64> = ln.iter().map(|v| v.ln()).collect();
    let c_log = ld.iter().zip(&lln).map(|(y, l)| y + l).sum::<f64>() / ld.len() as f64;
    let inverse_log = DecayFit {
        model: FitModel::InverseLog,
        params: vec![c_log.exp()],
        residual: rms(ld.iter().zip(&lln).map(|(y, l)| y - (c_log - l))),
    };

    let (icpt, slope) = least_squares_line(&ln, &ld);
    let power = DecayFit {
        model: FitModel::Power,
        params: vec![icpt.exp(), -slope],
        residual: rms(ld.iter().zip(&ln).map(|(y, x)| y - (icpt + slope * x))),
    };
    vec![inverse_log, power, plateau]
}

/// Optimal-approximant distances `d_n(f)` on a degree schedule with a decay
/// diagnosis. Degrees run in parallel; results are collected in order.
pub fn cyclicity_scan(space: &Space, f: &Poly, n_max: usize, schedule: Option<&[usize]>) -> Result<CyclicityReport> {
    let mut degrees: Vec<usize> = match schedule {
        Some(s) => s.iter().copied().filter(|&n| n <= n_max).collect(),
        None => default_schedule(n_max),
    };
    degrees.push(n_max);
    degrees.push(n_max / 2);
    degrees.sort_unstable();
    degrees.dedup();
    let distances: Vec<f64> = degrees
        .par_iter()
        .map(|&n| {
            if space.is_hilbert() {
                opa(space, f, n).map(|r| r.distance)
            } else {
                opa_descent(space, f, n, DescentParams::default()).map(|r| r.distance)
            }
        })
        .collect::<Result<Vec<f64>>>()?;

    let last = distances[degrees.iter().position(|&n| n == n_max).unwrap()];
    let half = distances[degrees.iter().position(|&n| n == n_max / 2).unwrap()];
    let verdict = if last >= PLATEAU_FLOOR && (last - half).abs() <= PLATEAU_TOLERANCE * last {
        Verdict::Plateau
    } else {
        Verdict::Decaying
    };
    let candidate_fits = fits(&degrees, &distances);
    let decay_fit = candidate_fits
        .iter()
        .find(|f| f.model == FitModel::Plateau && f.residual <= PLATEAU_FIT_RESIDUAL)
        .or_else(|| {
            candidate_fits
                .iter()
                .filter(|f| f.model != FitModel::Plateau)
                .min_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap())
        })
        .cloned();
    Ok(CyclicityReport {
        degrees,
        distances,
        decay_fit,
        candidate_fits,
        verdict,
        plateau_floor: PLATEAU_FLOOR,
        plateau_tolerance: PLATEAU_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrat::Rat;

    fn one_minus_z() -> Poly {
        Poly::from_real(&[1.0, -1.0])
    }

    #[test]
    fn schedule_shape() {
        assert_eq!(default_schedule(64), vec![0, 1, 2, 4, 8, 16, 32, 64]);
        assert_eq!(default_schedule(12), vec![0, 1, 2, 4, 6, 8, 12]);
    }

    #[test]
    fn hardy_decays_like_power() {
        let r = cyclicity_scan(&Space::hardy(), &one_minus_z(), 64, None).unwrap();
        assert_eq!(r.verdict, Verdict::Decaying);
        let fit = r.decay_fit.unwrap();
        assert_eq!(fit.model, FitModel::Power);
        assert!((fit.params[1] - 0.5).abs() < 0.1);
    }

    #[test]
    fn hb_plateaus() {
        let s = Space::de_branges_rovnyak(Rat::from(Poly::from_real(&[0.5, 0.5]))).unwrap();
        let r = cyclicity_scan(&s, &one_minus_z(), 64, None).unwrap();
        assert_eq!(r.verdict, Verdict::Plateau);
    }

    #[test]
    fn dirichlet_decays() {
        let s = Space::weighted_dirichlet(0.0).unwrap();
        let r = cyclicity_scan(&s, &one_minus_z(), 128, None).unwrap();
        assert_eq!(r.verdict, Verdict::Decaying);
    }
}

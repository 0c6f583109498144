//! The five function spaces of the lab, their inner products, Gram
//! matrices, norms and reproducing kernels.
//!
//! Conventions: `dA` is area measure normalized to mass one on the disc,
//! inner products are linear in the first slot, and `G[m][n] = <χ_m, χ_n>`.

mod dirichlet;
mod gram;
mod inner;
mod kernel;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::polyrat::{default_truncation, mate, Rat, RationalMate};
use crate::quadrature::QuadratureSpec;

pub use dirichlet::{energy_identity_check, local_dirichlet, u_mu, EnergyIdentity};
pub use gram::GramMatrix;
pub use inner::{
    algebra_norm, besov_monomial_algebra_norm_pow, beta, gram, inner, monomial_gram, monomial_gram_matrix,
    monomial_norm_sq, norm, norm_report, NormReport,
};
pub use kernel::kernel;

/// Human-readable statement of the normalizations, embedded in outputs.
pub const CONVENTIONS: &str =
    "dA normalized to unit mass on the disc; <f,g> linear in f; G[m][n] = <z^m, z^n>";

/// A point mass of the measure μ on the closed disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub location: Complex64,
    pub weight: f64,
}

impl Atom {
    pub fn on_circle(&self) -> bool {
        (self.location.norm() - 1.0).abs() <= 1e-12
    }
}

/// Finitely supported positive measure on the closed disc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct MeasureAtoms {
    atoms: Vec<Atom>,
}

impl TryFrom<Vec<Atom>> for MeasureAtoms {
    type Error = LabError;
    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        MeasureAtoms::new(atoms)
    }
}

impl From<MeasureAtoms> for Vec<Atom> {
    fn from(m: MeasureAtoms) -> Self {
        m.atoms
    }
}

impl MeasureAtoms {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(LabError::InvalidInput("measure needs at least one atom".into()));
        }
        let mut out = Vec::with_capacity(atoms.len());
        for a in atoms {
            let r = a.location.norm();
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(LabError::InvalidInput(format!("atom weight {} must be positive", a.weight)));
            }
            if !r.is_finite() || r > 1.0 + 1e-12 {
                return Err(LabError::InvalidInput(format!(
                    "atom at {} lies outside the closed disc",
                    a.location
                )));
            }
            let location = if (r - 1.0).abs() <= 1e-12 { a.location / r } else { a.location };
            out.push(Atom { location, weight: a.weight });
        }
        Ok(MeasureAtoms { atoms: out })
    }

    /// Unit point mass at `location`.
    pub fn dirac(location: Complex64) -> Result<Self> {
        MeasureAtoms::new(vec![Atom { location, weight: 1.0 }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

/// Which space, with its parameters. Serializes as `{"kind": .., "params": {..}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum SpaceKind {
    Hardy,
    WeightedDirichlet { alpha: f64 },
    BesovDirichlet { p: f64, alpha: f64 },
    DeBrangesRovnyak { b: Rat },
    HarmonicDirichlet { atoms: MeasureAtoms },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub kind: SpaceKind,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

impl From<SpaceKind> for SpaceSpec {
    fn from(kind: SpaceKind) -> Self {
        SpaceSpec {
            kind,
            quadrature: QuadratureSpec::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Model {
    Hardy,
    Weighted { alpha: f64 },
    Besov { p: f64, alpha: f64 },
    DeBrangesRovnyak(Box<RationalMate>),
    HarmonicDirichlet(MeasureAtoms),
}

/// A validated space ready for computation (the mate of `b` is computed
/// once here for de Branges–Rovnyak spaces).
#[derive(Clone, Debug)]
pub struct Space {
    spec: SpaceSpec,
    pub(crate) model: Model,
    warnings: Vec<String>,
}

impl Space {
    pub fn new(spec: SpaceSpec) -> Result<Self> {
        let mut warnings = Vec::new();
        if spec.quadrature.radial_nodes == 0 || spec.quadrature.angular_nodes == 0 {
            return Err(LabError::InvalidInput("quadrature node counts must be positive".into()));
        }
        let model = match &spec.kind {
            SpaceKind::Hardy => Model::Hardy,
            SpaceKind::WeightedDirichlet { alpha } => {
                check_alpha(*alpha)?;
                Model::Weighted { alpha: *alpha }
            }
            SpaceKind::BesovDirichlet { p, alpha } => {
                check_alpha(*alpha)?;
                if !(p.is_finite() && *p > 1.0) {
                    return Err(LabError::InvalidInput(format!("Besov exponent p = {p} must exceed 1")));
                }
                if !(alpha + 1.0 <= *p && *p <= alpha + 2.0) {
                    warnings.push(format!(
                        "Besov parameters p = {p}, alpha = {alpha} lie outside alpha+1 <= p <= alpha+2"
                    ));
                }
                Model::Besov { p: *p, alpha: *alpha }
            }
            SpaceKind::DeBrangesRovnyak { b } => {
                Model::DeBrangesRovnyak(Box::new(mate(b, default_truncation(64))?))
            }
            SpaceKind::HarmonicDirichlet { atoms } => Model::HarmonicDirichlet(atoms.clone()),
        };
        Ok(Space { spec, model, warnings })
    }

    pub fn hardy() -> Self {
        Space::new(SpaceKind::Hardy.into()).expect("Hardy space is always valid")
    }

    pub fn weighted_dirichlet(alpha: f64) -> Result<Self> {
        Space::new(SpaceKind::WeightedDirichlet { alpha }.into())
    }

    pub fn besov_dirichlet(p: f64, alpha: f64) -> Result<Self> {
        Space::new(SpaceKind::BesovDirichlet { p, alpha }.into())
    }

    pub fn de_branges_rovnyak(b: Rat) -> Result<Self> {
        Space::new(SpaceKind::DeBrangesRovnyak { b }.into())
    }

    pub fn harmonic_dirichlet(atoms: MeasureAtoms) -> Result<Self> {
        Space::new(SpaceKind::HarmonicDirichlet { atoms }.into())
    }

    pub fn with_quadrature(mut self, q: QuadratureSpec) -> Self {
        self.spec.quadrature = q;
        self
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.spec.quadrature
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `false` only for Besov–Dirichlet spaces with `p != 2`.
    pub fn is_hilbert(&self) -> bool {
        match self.model {
            Model::Besov { p, .. } => p == 2.0,
            _ => true,
        }
    }

    pub(crate) fn require_hilbert(&self) -> Result<()> {
        match self.model {
            Model::Besov { p, .. } if p != 2.0 => Err(LabError::NonHilbertSpace { p }),
            _ => Ok(()),
        }
    }

    /// The mate data when this is a de Branges–Rovnyak space.
    pub fn mate(&self) -> Option<&RationalMate> {
        match &self.model {
            Model::DeBrangesRovnyak(m) => Some(m),
            _ => None,
        }
    }

    pub fn atoms(&self) -> Option<&MeasureAtoms> {
        match &self.model {
            Model::HarmonicDirichlet(a) => Some(a),
            _ => None,
        }
    }

    /// Short label used in reports.
    pub fn label(&self) -> String {
        match &self.model {
            Model::Hardy => "H2".into(),
            Model::Weighted { alpha } => format!("D_{alpha}"),
            Model::Besov { p, alpha } => format!("D^{p}_{alpha}"),
            Model::DeBrangesRovnyak(_) => "H(b)".into(),
            Model::HarmonicDirichlet(a) => format!("D(mu), {} atoms", a.atoms().len()),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > -1.0 {
        Ok(())
    } else {
        Err(LabError::InvalidInput(format!("alpha = {alpha} must exceed -1")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_shape() {
        let s: SpaceSpec = serde_json::from_str(r#"{"kind":"hardy"}"#).unwrap();
        assert_eq!(s.kind, SpaceKind::Hardy);
        let s: SpaceSpec =
            serde_json::from_str(r#"{"kind":"besov-dirichlet","params":{"p":3,"alpha":1.5}}"#).unwrap();
        assert_eq!(s.kind, SpaceKind::BesovDirichlet { p: 3.0, alpha: 1.5 });
        let s: SpaceSpec = serde_json::from_str(
            r#"{"kind":"harmonic-dirichlet","params":{"atoms":[{"location":[1,0],"weight":1}]}}"#,
        )
        .unwrap();
        let back: SpaceSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SpaceSpec>(
            r#"{"kind":"harmonic-dirichlet","params":{"atoms":[{"location":[2,0],"weight":1}]}}"#
        )
        .is_err());
    }

    #[test]
    fn besov_parameter_warning() {
        assert!(Space::besov_dirichlet(2.0, 0.0).unwrap().warnings().is_empty());
        assert_eq!(Space::besov_dirichlet(4.0, 0.0).unwrap().warnings().len(), 1);
        assert!(Space::besov_dirichlet(1.0, 0.0).is_err());
        assert!(Space::weighted_dirichlet(-1.0).is_err());
    }
}

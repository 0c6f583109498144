//! Experiment manifests, the run dispatcher and run records.

pub mod suite;

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::approximants::{bpe_estimate, cyclicity_scan, default_schedule, opa, opa_descent, DescentParams};
use crate::corona::{exponent_sweep, CoronaFamily, DiscGrid};
use crate::error::{LabError, Result};
use crate::growth::monomial_growth;
use crate::outerlab::{boundary_zeros, default_radii, outer_check, shapiro_shields_decay};
use crate::polyrat::{default_truncation, mate, Poly, Rat};
use crate::quadrature::QuadratureSpec;
use crate::spaces::{energy_identity_check, monomial_gram, MeasureAtoms, Space, SpaceKind, SpaceSpec, CONVENTIONS};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn default_name() -> String {
    "experiment".into()
}

fn default_truncation_length() -> usize {
    default_truncation(64)
}

fn default_degree_schedule() -> Vec<usize> {
    vec![0, 1, 2, 4, 8, 16]
}

/// Parameters of a `mate` experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MateParams {
    pub b: Rat,
    #[serde(default = "default_truncation_length")]
    pub truncation_length: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramParams {
    pub space: SpaceSpec,
    pub n_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpaParams {
    pub space: SpaceSpec,
    pub f: Poly,
    pub degree: usize,
    #[serde(default)]
    pub descent: DescentParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyclicityParams {
    pub space: SpaceSpec,
    pub f: Poly,
    pub n_max: usize,
    #[serde(default)]
    pub schedule: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BpeParams {
    pub space: SpaceSpec,
    pub zeta: Complex64,
    pub n_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoronaSweepParams {
    pub space: SpaceSpec,
    pub family: CoronaFamily,
    #[serde(default = "default_degree_schedule")]
    pub degree_schedule: Vec<usize>,
    #[serde(default)]
    pub grid: DiscGrid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthParams {
    pub space: SpaceSpec,
    pub n_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityCheckParams {
    pub atoms: MeasureAtoms,
    pub g: Poly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OuterParams {
    pub f: Poly,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
}

/// One experiment, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Mate(MateParams),
    Gram(GramParams),
    Opa(OpaParams),
    Cyclicity(CyclicityParams),
    Bpe(BpeParams),
    CoronaSweep(CoronaSweepParams),
    Growth(GrowthParams),
    IdentityCheck(IdentityCheckParams),
    Outer(OuterParams),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Mate(..) => "mate",
            Experiment::Gram(..) => "gram",
            Experiment::Opa(..) => "opa",
            Experiment::Cyclicity(..) => "cyclicity",
            Experiment::Bpe(..) => "bpe",
            Experiment::CoronaSweep(..) => "corona-sweep",
            Experiment::Growth(..) => "growth",
            Experiment::IdentityCheck(..) => "identity-check",
            Experiment::Outer(..) => "outer",
        }
    }

    fn has_csv(&self) -> bool {
        matches!(
            self,
            Experiment::Gram(..)
                | Experiment::Cyclicity(..)
                | Experiment::Bpe(..)
                | Experiment::CoronaSweep(..)
                | Experiment::Growth(..)
        )
    }

    fn space(&self) -> Option<&SpaceSpec> {
        match self {
            Experiment::Gram(GramParams { space, .. })
            | Experiment::Opa(OpaParams { space, .. })
            | Experiment::Cyclicity(CyclicityParams { space, .. })
            | Experiment::Bpe(BpeParams { space, .. })
            | Experiment::CoronaSweep(CoronaSweepParams { space, .. })
            | Experiment::Growth(GrowthParams { space, .. }) => Some(space),
            _ => None,
        }
    }
}

/// Output file names, relative to the output directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub json: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default = "default_name")]
    pub name: String,
    pub experiment: Experiment,
    #[serde(default)]
    pub outputs: Outputs,
}

impl Manifest {
    /// Parses and validates a JSON manifest and fills in every default, so
    /// that the stored form is fully explicit.
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| LabError::Validation {
            path: "<root>".into(),
            message: e.to_string(),
        })?;
        let mut m: Manifest = match deserialize_at(&value, "") {
            Ok(m) => m,
            Err((path, message)) => {
                let (path, message) = refine(&value, path, message);
                return Err(LabError::Validation {
                    path: if path.is_empty() { "<root>".into() } else { path },
                    message,
                });
            }
        };
        m.materialize()?;
        Ok(m)
    }

    fn materialize(&mut self) -> Result<()> {
        let invalid = |path: &str, message: &str| LabError::Validation {
            path: path.into(),
            message: message.into(),
        };
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(invalid("name", "must be a nonempty file stem"));
        }
        match &mut self.experiment {
            Experiment::Cyclicity(CyclicityParams { n_max, schedule, .. }) => {
                if schedule.is_none() {
                    *schedule = Some(default_schedule(*n_max));
                }
            }
            Experiment::Outer(OuterParams { radii, .. }) => {
                if radii.is_none() {
                    *radii = Some(default_radii());
                }
            }
            Experiment::CoronaSweep(CoronaSweepParams { degree_schedule, .. }) if degree_schedule.is_empty() => {
                return Err(invalid("experiment.degree_schedule", "must not be empty"));
            }
            _ => {}
        }
        if self.outputs.json.is_none() {
            self.outputs.json = Some(format!("{}.json", self.name));
        }
        if self.outputs.csv.is_none() && self.experiment.has_csv() {
            self.outputs.csv = Some(format!("{}.csv", self.name));
        }
        Ok(())
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    /// SHA-256 of the canonical (materialized) manifest.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

type ParseFailure = (String, String);

fn join(prefix: &str, path: &str) -> String {
    match (prefix.is_empty(), path == "." || path.is_empty()) {
        (_, true) => prefix.to_string(),
        (true, false) => path.to_string(),
        (false, false) => format!("{prefix}.{path}"),
    }
}

fn deserialize_at<T: serde::de::DeserializeOwned>(v: &Value, prefix: &str) -> std::result::Result<T, ParseFailure> {
    serde_path_to_error::deserialize(v).map_err(|e| (join(prefix, &e.path().to_string()), e.inner().to_string()))
}

fn lookup<'a>(root: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').filter(|k| !k.is_empty()).try_fold(root, |v, k| match k.parse::<usize>() {
        Ok(i) if v.is_array() => v.get(i),
        _ => v.get(k),
    })
}

fn without(v: &Value, keys: &[&str]) -> Value {
    let mut obj = v.as_object().cloned().unwrap_or_default();
    for k in keys {
        obj.remove(*k);
    }
    Value::Object(obj)
}

/// Tagged and flattened objects are buffered during deserialization, so an
/// error inside one is reported at the object itself. Re-reading the object
/// through its untagged parts recovers the offending field.
fn refine(root: &Value, path: String, message: String) -> ParseFailure {
    let Some(obj) = lookup(root, &path) else {
        return (path, message);
    };
    let kind = obj.get("kind").and_then(Value::as_str);
    let inner: std::result::Result<(), ParseFailure> = if path == "experiment" {
        let body = without(obj, &["kind"]);
        match kind {
            Some("mate") => deserialize_at::<MateParams>(&body, &path).map(drop),
            Some("gram") => deserialize_at::<GramParams>(&body, &path).map(drop),
            Some("opa") => deserialize_at::<OpaParams>(&body, &path).map(drop),
            Some("cyclicity") => deserialize_at::<CyclicityParams>(&body, &path).map(drop),
            Some("bpe") => deserialize_at::<BpeParams>(&body, &path).map(drop),
            Some("corona-sweep") => deserialize_at::<CoronaSweepParams>(&body, &path).map(drop),
            Some("growth") => deserialize_at::<GrowthParams>(&body, &path).map(drop),
            Some("identity-check") => deserialize_at::<IdentityCheckParams>(&body, &path).map(drop),
            Some("outer") => deserialize_at::<OuterParams>(&body, &path).map(drop),
            _ => Ok(()),
        }
    } else if path.ends_with("space") && kind.is_some() {
        deserialize_at::<SpaceKind>(&without(obj, &["quadrature"]), &path).map(drop).and_then(|_| match obj.get("quadrature") {
            Some(q) => deserialize_at::<QuadratureSpec>(q, &join(&path, "quadrature")).map(drop),
            None => Ok(()),
        })
    } else {
        Ok(())
    };
    match inner {
        Err((p, m)) if p != path => refine(root, p, m),
        _ => (path, message),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub name: String,
    pub kind: String,
    pub manifest_hash: String,
    pub software_version: String,
    pub conventions: String,
    pub tolerance_scale: f64,
    pub elapsed_seconds: f64,
    pub payload: Value,
    pub warnings: Vec<String>,
}

pub struct RunOutput {
    pub record: RunRecord,
    pub csv: Option<Vec<u8>>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn header(manifest: &Manifest) -> Vec<String> {
    let mut h = vec![
        format!("manifest_hash = {}", manifest.hash()),
        format!("software_version = {VERSION}"),
        format!("conventions = {CONVENTIONS}"),
    ];
    if let Some(s) = manifest.experiment.space() {
        h.push(format!(
            "quadrature = {} radial x {} angular nodes",
            s.quadrature.radial_nodes, s.quadrature.angular_nodes
        ));
    }
    h
}

/// Runs one experiment. The payload depends only on the manifest.
pub fn run(manifest: &Manifest, tolerance_scale: f64) -> Result<RunOutput> {
    let start = Instant::now();
    let head = header(manifest);
    let mut warnings = Vec::new();
    let mut csv = None;
    let space = manifest.experiment.space().map(|s| Space::new(s.clone())).transpose()?;
    if let Some(s) = &space {
        warnings.extend(s.warnings().iter().cloned());
    }
    let space_ref = || space.as_ref().expect("experiment has a space");
    let payload = match &manifest.experiment {
        Experiment::Mate(MateParams { b, truncation_length }) => to_value(&mate(b, *truncation_length)?),
        Experiment::Gram(GramParams { n_max, .. }) => {
            let g = monomial_gram(space_ref(), *n_max)?;
            let mut buf = Vec::new();
            g.write_csv(&mut buf, &head)?;
            csv = Some(buf);
            to_value(&g)
        }
        Experiment::Opa(OpaParams { f, degree, descent, .. }) => {
            let s = space_ref();
            if s.is_hilbert() {
                to_value(&opa(s, f, *degree)?)
            } else {
                to_value(&opa_descent(s, f, *degree, *descent)?)
            }
        }
        Experiment::Cyclicity(CyclicityParams { f, n_max, schedule, .. }) => {
            let r = cyclicity_scan(space_ref(), f, *n_max, schedule.as_deref())?;
            let mut buf = Vec::new();
            r.write_csv(&mut buf, &head)?;
            csv = Some(buf);
            to_value(&r)
        }
        Experiment::Bpe(BpeParams { zeta, n_max, .. }) => {
            let r = bpe_estimate(space_ref(), *zeta, *n_max)?;
            let mut buf = Vec::new();
            write_rows(&mut buf, &head, "n,v_n", r.values.iter().enumerate())?;
            csv = Some(buf);
            to_value(&r)
        }
        Experiment::CoronaSweep(CoronaSweepParams {
            family,
            degree_schedule,
            grid,
            ..
        }) => {
            let instances = family.instances(*grid)?;
            let fit = exponent_sweep(space_ref(), &instances, degree_schedule)?;
            let mut buf = Vec::new();
            fit.write_csv(&mut buf, &head)?;
            csv = Some(buf);
            to_value(&fit)
        }
        Experiment::Growth(GrowthParams { n_max, .. }) => {
            let r = monomial_growth(space_ref(), *n_max)?;
            let mut buf = Vec::new();
            r.write_csv(&mut buf, &head)?;
            csv = Some(buf);
            to_value(&r)
        }
        Experiment::IdentityCheck(IdentityCheckParams { atoms, g }) => {
            let r = energy_identity_check(atoms, g)?;
            warnings.extend(r.warnings.iter().cloned());
            to_value(&r)
        }
        Experiment::Outer(OuterParams { f, radii }) => {
            let radii = radii.clone().unwrap_or_else(default_radii);
            let zeros = boundary_zeros(f)?;
            let decay = zeros
                .iter()
                .map(|z| Ok(json!({ "zeta": z.zeta, "decay": shapiro_shields_decay(f, z.zeta, &radii)? })))
                .collect::<Result<Vec<_>>>()?;
            json!({
                "check": outer_check(f)?,
                "boundary_zeros": zeros,
                "shapiro_shields": decay,
            })
        }
    };
    Ok(RunOutput {
        record: RunRecord {
            name: manifest.name.clone(),
            kind: manifest.experiment.kind().into(),
            manifest_hash: manifest.hash(),
            software_version: VERSION.into(),
            conventions: CONVENTIONS.into(),
            tolerance_scale,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            payload,
            warnings,
        },
        csv,
    })
}

fn write_rows<'a, W: std::io::Write>(
    mut out: W,
    header: &[String],
    columns: &str,
    rows: impl Iterator<Item = (usize, &'a f64)>,
) -> Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{columns}")?;
    for (n, v) in rows {
        writeln!(out, "{n},{v:e}")?;
    }
    Ok(())
}

/// Writes the run record as JSON and the CSV table, if any, under `dir`.
pub fn write_outputs(manifest: &Manifest, out: &RunOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if let Some(name) = &manifest.outputs.json {
        let text = serde_json::to_string_pretty(&out.record).expect("record serializes");
        std::fs::write(dir.join(name), text + "\n")?;
    }
    if let (Some(name), Some(bytes)) = (&manifest.outputs.csv, &out.csv) {
        std::fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

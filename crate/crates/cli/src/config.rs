//! Declarative experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use spectra_cert_core::potential::{catalog, MagneticKind, Potential};
use spectra_cert_core::spectral::{ZWindow, BOX_MAX_POINTS};
use spectra_cert_core::{Error as CoreError, C64};

pub const DEFAULT_GRID_N: usize = 256;
pub const DEFAULT_R_MAX: f64 = 40.0;
pub const DEFAULT_ELL_MAX: usize = 32;

/// A config problem, tagged with the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CheckConditions,
    BsNorm,
    HsIdentity,
    Spectrum,
    Pseudospectrum,
    IdentityCheck,
    SingularSequence,
    MagneticSmoke,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::CheckConditions,
        Experiment::BsNorm,
        Experiment::HsIdentity,
        Experiment::Spectrum,
        Experiment::Pseudospectrum,
        Experiment::IdentityCheck,
        Experiment::SingularSequence,
        Experiment::MagneticSmoke,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CheckConditions => "check-conditions",
            Experiment::BsNorm => "bs-norm",
            Experiment::HsIdentity => "hs-identity",
            Experiment::Spectrum => "spectrum",
            Experiment::Pseudospectrum => "pseudospectrum",
            Experiment::IdentityCheck => "identity-check",
            Experiment::SingularSequence => "singular-sequence",
            Experiment::MagneticSmoke => "magnetic-smoke",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_path")]
    pub path: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            path: default_path(),
            formats: default_formats(),
        }
    }
}

fn default_path() -> PathBuf {
    PathBuf::from("spectra-cert-out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json]
}

/// Discretization used by `spectrum` and `pseudospectrum`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    /// One partial-wave sector on `(0, r_max)`.
    #[default]
    Radial,
    /// Finite differences on the cube `(−box_l, box_l)³`; `grid_n` points per axis.
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityName {
    Id1,
    Id2,
    Id3,
    Key,
    CanonicalTriple,
    RadialDerivative,
}

pub const DEFAULT_IDENTITIES: [IdentityName; 5] = [
    IdentityName::Id1,
    IdentityName::Id2,
    IdentityName::Id3,
    IdentityName::Key,
    IdentityName::CanonicalTriple,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub q: usize,
}

/// One experiment. Complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub potential: PotentialSpec,
    pub dimension: usize,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_ell_max")]
    pub ell_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outlier_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_list: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_window: Option<ZWindow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<f64>>,
    /// Partial-wave sector for the radial operator.
    #[serde(default)]
    pub ell: usize,
    #[serde(default)]
    pub operator: Operator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_l: Option<f64>,
    /// Pseudospectrum levels ε.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    /// Wave vector of the singular sequence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<Vec<IdentityName>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnetic: Option<MagneticKind>,
    /// Number of sample points for pointwise checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_grid_n() -> usize {
    DEFAULT_GRID_N
}

fn default_r_max() -> f64 {
    DEFAULT_R_MAX
}

fn default_ell_max() -> usize {
    DEFAULT_ELL_MAX
}

pub const DEFAULT_BOX_L: f64 = 4.0;
pub const DEFAULT_LEVELS: [f64; 3] = [1e-1, 1e-2, 1e-3];
pub const DEFAULT_K: [f64; 3] = [1.0, 0.0, 0.0];
pub const DEFAULT_SAMPLES: usize = 100;

pub fn c64(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl ExperimentConfig {
    pub fn potential(&self) -> Result<Potential, ConfigError> {
        catalog(&self.potential.name, &self.potential.params, self.dimension).map_err(|e| match e {
            CoreError::UnknownPotential(name) => {
                ConfigError::new("potential.name", format!("unknown potential `{name}`"))
            }
            CoreError::InvalidArgument {
                name: "dimension",
                reason,
            } => ConfigError::new("dimension", reason),
            CoreError::InvalidArgument { name, reason } => {
                ConfigError::new(format!("potential.params.{name}"), reason)
            }
            other => ConfigError::new("potential", other.to_string()),
        })
    }

    pub fn lambda_c64(&self) -> Option<C64> {
        self.lambda.map(c64)
    }

    pub fn z_points(&self) -> Vec<C64> {
        self.z_list
            .as_ref()
            .map(|l| l.iter().copied().map(c64).collect())
            .unwrap_or_default()
    }

    pub fn identities(&self) -> Vec<IdentityName> {
        self.identities
            .clone()
            .unwrap_or_else(|| DEFAULT_IDENTITIES.to_vec())
    }

    /// Checks everything the chosen experiment needs before any numerics run.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let exp = self.experiment;
        if self.dimension < 3 {
            return Err(ConfigError::new(
                "dimension",
                format!("d >= 3 required, got {}", self.dimension),
            ));
        }
        let needs_d3 = matches!(
            exp,
            Experiment::BsNorm
                | Experiment::HsIdentity
                | Experiment::Spectrum
                | Experiment::Pseudospectrum
                | Experiment::SingularSequence
                | Experiment::MagneticSmoke
        );
        if needs_d3 && self.dimension != 3 {
            return Err(ConfigError::new(
                "dimension",
                format!("{exp} requires dimension 3"),
            ));
        }
        self.potential()?;
        if self.grid_n < 2 {
            return Err(ConfigError::new("grid_n", "must be at least 2"));
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(ConfigError::new("r_max", "must be positive and finite"));
        }
        if let Some(t) = self.outlier_tol {
            if !(t >= 0.0) {
                return Err(ConfigError::new("outlier_tol", "must be non-negative"));
            }
        }
        if self.output.formats.is_empty() {
            return Err(ConfigError::new("output.formats", "must not be empty"));
        }
        if let Some(q) = self.quadrature {
            if q.panels == 0 || q.q == 0 {
                return Err(ConfigError::new(
                    "quadrature",
                    "panels and q must be positive",
                ));
            }
        }
        match exp {
            Experiment::BsNorm => {
                let zs = self
                    .z_list
                    .as_ref()
                    .ok_or_else(|| ConfigError::new("z_list", "bs-norm requires z_list"))?;
                if zs.is_empty() {
                    return Err(ConfigError::new("z_list", "must not be empty"));
                }
                if zs.iter().any(|z| z[1] == 0.0 && z[0] > 0.0) {
                    return Err(ConfigError::new(
                        "z_list",
                        "z must not lie on the open positive half-line",
                    ));
                }
            }
            Experiment::Spectrum | Experiment::Pseudospectrum => {
                self.validate_operator()?;
                if exp == Experiment::Pseudospectrum {
                    let w = self.z_window.as_ref().ok_or_else(|| {
                        ConfigError::new("z_window", "pseudospectrum requires z_window")
                    })?;
                    w.points()
                        .map_err(|e| ConfigError::new("z_window", e.to_string()))?;
                    if let Some(l) = &self.levels {
                        if l.iter().any(|e| !(*e > 0.0)) {
                            return Err(ConfigError::new("levels", "must be positive"));
                        }
                    }
                }
            }
            Experiment::IdentityCheck | Experiment::MagneticSmoke => {
                let l = self
                    .lambda
                    .ok_or_else(|| ConfigError::new("lambda", format!("{exp} requires lambda")))?;
                if !(l[0] > 0.0) || !l[1].is_finite() {
                    return Err(ConfigError::new("lambda", "needs Re lambda > 0"));
                }
                if let Some(ids) = &self.identities {
                    if ids.is_empty() {
                        return Err(ConfigError::new("identities", "must not be empty"));
                    }
                }
            }
            Experiment::SingularSequence => {
                let n = self.n_list.as_ref().ok_or_else(|| {
                    ConfigError::new("n_list", "singular-sequence requires n_list")
                })?;
                if n.len() < 2 || n.iter().any(|x| !(*x > 0.0)) {
                    return Err(ConfigError::new(
                        "n_list",
                        "needs at least two positive scales",
                    ));
                }
            }
            Experiment::CheckConditions | Experiment::HsIdentity => {}
        }
        Ok(())
    }

    fn validate_operator(&self) -> Result<(), ConfigError> {
        match self.operator {
            Operator::Radial => {
                if self.grid_n < 8 {
                    return Err(ConfigError::new(
                        "grid_n",
                        "radial operator needs grid_n >= 8",
                    ));
                }
            }
            Operator::Box => {
                let n = self.grid_n;
                if n % 2 != 0 || n.saturating_mul(n).saturating_mul(n) > BOX_MAX_POINTS {
                    return Err(ConfigError::new(
                        "grid_n",
                        format!(
                            "box operator needs an even grid_n with grid_n^3 <= {BOX_MAX_POINTS}"
                        ),
                    ));
                }
                if let Some(l) = self.box_l {
                    if !(l > 0.0 && l.is_finite()) {
                        return Err(ConfigError::new("box_l", "must be positive and finite"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Applies `key=value` overrides to a raw document. Dotted keys address
/// nested objects; values parse as JSON and fall back to plain strings.
pub fn apply_overrides(doc: &mut Value, sets: &[String]) -> Result<(), ConfigError> {
    for s in sets {
        let (key, raw) = s
            .split_once('=')
            .ok_or_else(|| ConfigError::new("--set", format!("expected key=value, got `{s}`")))?;
        if key.is_empty() {
            return Err(ConfigError::new("--set", "empty key"));
        }
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut cur = &mut *doc;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let obj = cur
                .as_object_mut()
                .ok_or_else(|| ConfigError::new(key, "parent is not an object"))?;
            if i + 1 == parts.len() {
                obj.insert(part.to_string(), value.clone());
                break;
            }
            cur = obj
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Default::default()));
        }
    }
    Ok(())
}

/// Parses and validates a config document, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_with_overrides(text, &[])
}

pub fn parse_with_overrides(text: &str, sets: &[String]) -> Result<ExperimentConfig, ConfigError> {
    let mut doc: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError::new("document", format!("malformed JSON: {e}")))?;
    apply_overrides(&mut doc, sets)?;
    from_value(doc)
}

fn from_value(doc: Value) -> Result<ExperimentConfig, ConfigError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| ConfigError::new("document", "top level must be an object"))?;
    match obj.get("experiment") {
        None => return Err(ConfigError::new("experiment", "missing field")),
        Some(Value::String(s)) if Experiment::from_name(s).is_none() => {
            let known: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            return Err(ConfigError::new(
                "experiment",
                format!(
                    "unknown experiment `{s}`, expected one of {}",
                    known.join(", ")
                ),
            ));
        }
        Some(Value::String(_)) => {}
        Some(_) => return Err(ConfigError::new("experiment", "must be a string")),
    }
    for key in ["potential", "dimension"] {
        if !obj.contains_key(key) {
            return Err(ConfigError::new(key, "missing field"));
        }
    }
    let cfg: ExperimentConfig =
        serde_json::from_value(doc).map_err(|e| ConfigError::new("config", e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

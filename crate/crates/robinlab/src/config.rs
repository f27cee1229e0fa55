//! Problem configuration: the JSON document that pins a run.
//!
//! A config names a mesh, a diffusion coefficient, a boundary operator, a
//! seed, and an output directory. Parsing is strict (unknown fields are
//! rejected) and the canonical serialization is hashed so every artifact can
//! state exactly which problem produced it.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble, AssembledProblem, CoefficientField, CoefficientSpec};
use crate::boundary::{discretize, BoundaryOperatorSpec};
use crate::error::{Error, Result};
use crate::geometry::{build_disk_mesh, build_interval_mesh, Mesh};
use crate::report;

/// Mesh description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// Uniform interval [a, b] with n cells.
    Interval { a: f64, b: f64, n: usize },
    /// Unit disk with n_r rings of n_theta sectors.
    Disk { n_r: usize, n_theta: usize },
}

impl DomainSpec {
    pub fn build_mesh(&self) -> Result<Mesh> {
        match *self {
            DomainSpec::Interval { a, b, n } => build_interval_mesh(a, b, n),
            DomainSpec::Disk { n_r, n_theta } => build_disk_mesh(n_r, n_theta),
        }
    }

    /// Spatial dimension, used to pick expected decay exponents.
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Disk { .. } => 2,
        }
    }
}

/// Complete description of one discretized problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub domain: DomainSpec,
    pub coefficient: CoefficientSpec,
    pub boundary_operator: BoundaryOperatorSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

fn default_output_dir() -> String {
    ".".to_string()
}

impl ProblemConfig {
    /// Parse from JSON, rejecting unknown fields and malformed documents.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Canonical JSON form; the basis for the config hash.
    pub fn canonical_json(&self) -> Result<String> {
        report::to_canonical_json(self)
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn sha256(&self) -> Result<String> {
        Ok(report::sha256_hex(self.canonical_json()?.as_bytes()))
    }

    /// Hash of the problem identity alone: domain, coefficient, and boundary
    /// operator. Seed and output directory are run placement, reported
    /// separately in artifacts, so two runs of the same problem embed the
    /// same hash no matter where their files land.
    pub fn problem_sha256(&self) -> Result<String> {
        let mut canonical = self.clone();
        canonical.seed = 0;
        canonical.output_dir = default_output_dir();
        canonical.sha256()
    }

    /// Assemble the discrete problem this config describes.
    pub fn build_problem(&self) -> Result<AssembledProblem> {
        let mesh = self.domain.build_mesh()?;
        let coefficient = CoefficientField::new(self.coefficient)?;
        let boundary = discretize(&self.boundary_operator, &mesh)?;
        assemble(&mesh, coefficient, boundary)
    }
}

/// Initial datum for an evolution run, parsed from a compact string form:
/// `constant`, `hat:K` (nodal indicator of vertex K), or a named expression
/// (`x` for the first coordinate, `one_minus_r2` for 1 − |x|²).
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Constant,
    Hat(usize),
    CoordinateX,
    OneMinusR2,
}

impl InitialData {
    pub fn parse(text: &str) -> Result<Self> {
        if let Some(rest) = text.strip_prefix("hat:") {
            let idx: usize = rest.parse().map_err(|_| {
                Error::Config(format!("hat index must be a vertex number, got {rest:?}"))
            })?;
            return Ok(InitialData::Hat(idx));
        }
        match text {
            "constant" => Ok(InitialData::Constant),
            "x" => Ok(InitialData::CoordinateX),
            "one_minus_r2" => Ok(InitialData::OneMinusR2),
            other => Err(Error::Config(format!(
                "unknown initial datum {other:?}; expected constant, hat:K, x, or one_minus_r2"
            ))),
        }
    }

    /// Evaluate on the mesh nodes.
    pub fn eval(&self, mesh: &Mesh) -> Result<DVector<f64>> {
        let n = mesh.n_vertices();
        match *self {
            InitialData::Constant => Ok(DVector::from_element(n, 1.0)),
            InitialData::Hat(k) => {
                if k >= n {
                    return Err(Error::Config(format!(
                        "hat index {k} out of range for a mesh with {n} vertices"
                    )));
                }
                Ok(DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 }))
            }
            InitialData::CoordinateX => Ok(DVector::from_fn(n, |i, _| mesh.vertices[i][0])),
            InitialData::OneMinusR2 => Ok(DVector::from_fn(n, |i, _| {
                1.0 - mesh.vertices[i].iter().map(|v| v * v).sum::<f64>()
            })),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryFn;

    fn sample() -> ProblemConfig {
        ProblemConfig {
            domain: DomainSpec::Disk {
                n_r: 3,
                n_theta: 16,
            },
            coefficient: CoefficientSpec::Constant(1.0),
            boundary_operator: BoundaryOperatorSpec::RankOne {
                v: BoundaryFn::Cos(1),
            },
            seed: 7,
            output_dir: "out".to_string(),
        }
    }

    #[test]
    fn configs_round_trip_through_canonical_json() {
        let config = sample();
        let text = config.canonical_json().unwrap();
        let back = ProblemConfig::from_json(&text).unwrap();
        assert_eq!(back, config);
        assert_eq!(back.canonical_json().unwrap(), text);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "domain": {"interval": {"a": -1.0, "b": 1.0, "n": 10}},
            "coefficient": {"constant": 1.0},
            "boundary_operator": "zero",
            "typo_field": 3
        }"#;
        let err = ProblemConfig::from_json(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("typo_field"));
    }

    #[test]
    fn seed_and_output_dir_have_defaults() {
        let text = r#"{
            "domain": {"interval": {"a": 0.0, "b": 1.0, "n": 4}},
            "coefficient": {"constant": 2.0},
            "boundary_operator": "zero"
        }"#;
        let config = ProblemConfig::from_json(text).unwrap();
        assert_eq!(config.seed, 0);
        assert_eq!(config.output_dir, ".");
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let config = sample();
        assert_eq!(config.sha256().unwrap(), config.sha256().unwrap());
        let mut other = config.clone();
        other.seed = 8;
        assert_ne!(config.sha256().unwrap(), other.sha256().unwrap());
    }

    #[test]
    fn configs_assemble_into_problems() {
        let problem = sample().build_problem().unwrap();
        assert_eq!(problem.n(), 1 + 3 * 16);
        assert_eq!(problem.boundary.n(), 16);
    }

    #[test]
    fn initial_data_forms_parse_and_evaluate() {
        let mesh = build_interval_mesh(-1.0, 1.0, 4).unwrap();
        let ones = InitialData::parse("constant").unwrap().eval(&mesh).unwrap();
        assert!(ones.iter().all(|&v| v == 1.0));
        let hat = InitialData::parse("hat:2").unwrap().eval(&mesh).unwrap();
        assert_eq!(hat.sum(), 1.0);
        assert_eq!(hat[2], 1.0);
        let x = InitialData::parse("x").unwrap().eval(&mesh).unwrap();
        assert_eq!(x[0], -1.0);
        assert!(InitialData::parse("hat:99").unwrap().eval(&mesh).is_err());
        assert!(InitialData::parse("wavelet").is_err());
    }
}

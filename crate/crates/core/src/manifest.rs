// SPDX-License-Identifier: Apache-2.0

//! Loading evaluation manifests and curriculum documents.
//!
//! ```json
//! {
//!   "system": {"name": "model-a", "priors_rho": 1.0, "notes": ""},
//!   "curriculum": {
//!     "compute_unit": "teraflops",
//!     "domains": [
//!       {"id": "home", "sample_count": 640, "compute_power": 127.53,
//!        "training_time_seconds": 3600,
//!        "tasks": [{"spec_text": "...", "reference_program": [ ... ]}]}
//!     ]
//!   },
//!   "test_tasks": [
//!     {"id": "t1", "spec_text": "...", "reference_program": [ ... ],
//!      "generated_program": "<raw document text, possibly malformed>"}
//!   ]
//! }
//! ```
//!
//! Programs may be given inline as a JSON array or as a string holding the
//! document text. `compute_unit` may be `petaflops`, in which case compute
//! figures are multiplied by 1000 on load. A domain may omit its compute
//! figures when the curriculum gives `total_compute_power` and
//! `total_training_time_seconds`; the total compute-time product is then
//! split across domains in proportion to their sample counts.

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::dag::{build_dag, ProgramDag};
use crate::divergence::ProgramLoadError;
use crate::flow::{parse_flow, parse_flow_value};
use crate::generalization::{Curriculum, CurriculumDomain, GeneratedProgram, TaskInstance};
use crate::gindex::{EvaluationManifest, SystemDescriptor};

/// A manifest problem, located by a dotted field path.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{path}: {message}")]
pub struct ManifestError {
    pub path: String,
    pub message: String,
}

impl ManifestError {
    fn at(path: impl Into<String>, message: impl ToString) -> Self {
        ManifestError {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComputeUnit {
    #[default]
    Teraflops,
    Petaflops,
}

impl ComputeUnit {
    pub fn to_teraflops(self, value: f64) -> f64 {
        match self {
            ComputeUnit::Teraflops => value,
            ComputeUnit::Petaflops => value * 1000.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ProgramSource {
    Text(String),
    Document(Value),
}

impl ProgramSource {
    fn load(&self) -> Result<ProgramDag, ProgramLoadError> {
        let program = match self {
            ProgramSource::Text(text) => parse_flow(text)?,
            ProgramSource::Document(value) => parse_flow_value(value)?,
        };
        Ok(build_dag(&program)?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    name: String,
    #[serde(default = "default_rho")]
    priors_rho: f64,
    #[serde(default)]
    notes: String,
}

fn default_rho() -> f64 {
    SystemDescriptor::DEFAULT_RHO
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainingTaskDoc {
    id: Option<String>,
    #[serde(default)]
    spec_text: String,
    reference_program: ProgramSource,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainDoc {
    id: String,
    sample_count: u64,
    compute_power: Option<f64>,
    training_time_seconds: Option<f64>,
    tasks: Vec<TrainingTaskDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurriculumDoc {
    #[serde(default)]
    compute_unit: ComputeUnit,
    total_compute_power: Option<f64>,
    total_training_time_seconds: Option<f64>,
    domains: Vec<DomainDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestTaskDoc {
    id: Option<String>,
    #[serde(default)]
    spec_text: String,
    reference_program: ProgramSource,
    generated_program: ProgramSource,
    domain_id: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestDoc {
    system: SystemDoc,
    curriculum: CurriculumDoc,
    test_tasks: Vec<TestTaskDoc>,
}

fn deserialize<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, ManifestError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let path = if path == "." { "(document)".to_string() } else { path };
        ManifestError::at(path, inner)
    })
}

fn load_reference(source: &ProgramSource, path: &str, id: &str, spec_text: &str) -> Result<TaskInstance, ManifestError> {
    let dag = source.load().map_err(|e| ManifestError::at(path, e))?;
    TaskInstance::new(id, spec_text, dag).map_err(|e| ManifestError::at(path, e))
}

fn build_curriculum(doc: CurriculumDoc, base: &str) -> Result<Curriculum, ManifestError> {
    let total_samples: u64 = doc.domains.iter().map(|d| d.sample_count).sum();
    let totals = match (doc.total_compute_power, doc.total_training_time_seconds) {
        (Some(c), Some(t)) => Some((doc.compute_unit.to_teraflops(c), t)),
        (None, None) => None,
        _ => {
            return Err(ManifestError::at(
                base,
                "total_compute_power and total_training_time_seconds must be given together",
            ))
        }
    };
    let mut domains = Vec::with_capacity(doc.domains.len());
    for (i, d) in doc.domains.into_iter().enumerate() {
        let path = format!("{base}.domains[{i}]");
        let (compute, time) = match (d.compute_power, d.training_time_seconds, totals) {
            (Some(c), Some(t), _) => (doc.compute_unit.to_teraflops(c), t),
            (None, None, Some((c, t))) if total_samples > 0 => {
                (c * d.sample_count as f64 / total_samples as f64, t)
            }
            (None, None, _) => {
                return Err(ManifestError::at(
                    path,
                    "missing compute_power and training_time_seconds, and no curriculum totals given",
                ))
            }
            _ => {
                return Err(ManifestError::at(
                    path,
                    "compute_power and training_time_seconds must be given together",
                ))
            }
        };
        if d.tasks.is_empty() {
            return Err(ManifestError::at(format!("{path}.tasks"), "domain has no tasks"));
        }
        let mut tasks = Vec::with_capacity(d.tasks.len());
        for (k, t) in d.tasks.iter().enumerate() {
            let id = t.id.clone().unwrap_or_else(|| format!("{}/{k}", d.id));
            tasks.push(load_reference(
                &t.reference_program,
                &format!("{path}.tasks[{k}].reference_program"),
                &id,
                &t.spec_text,
            )?);
        }
        let domain = CurriculumDomain::new(d.id, tasks, d.sample_count, compute, time)
            .map_err(|e| ManifestError::at(path, e))?;
        domains.push(domain);
    }
    Curriculum::new(domains).map_err(|e| ManifestError::at(format!("{base}.domains"), e))
}

/// Parses a curriculum document.
pub fn parse_curriculum(text: &str) -> Result<Curriculum, ManifestError> {
    build_curriculum(deserialize(text)?, "curriculum")
}

/// Parses an evaluation manifest. Reference programs must load; a generated
/// program that does not is kept as [`GeneratedProgram::Unparseable`].
pub fn parse_manifest(text: &str) -> Result<EvaluationManifest, ManifestError> {
    let doc: ManifestDoc = deserialize(text)?;
    let system = SystemDescriptor::new(doc.system.name, doc.system.priors_rho)
        .map_err(|e| ManifestError::at("system.priors_rho", e))?
        .with_notes(doc.system.notes);
    let curriculum = build_curriculum(doc.curriculum, "curriculum")?;
    let mut tasks = Vec::with_capacity(doc.test_tasks.len());
    for (i, t) in doc.test_tasks.iter().enumerate() {
        let path = format!("test_tasks[{i}]");
        let id = t.id.clone().unwrap_or_else(|| format!("test-{i}"));
        let mut task = load_reference(
            &t.reference_program,
            &format!("{path}.reference_program"),
            &id,
            &t.spec_text,
        )?;
        let generated = match t.generated_program.load() {
            Ok(dag) => GeneratedProgram::Program(dag),
            Err(e) => GeneratedProgram::Unparseable(e),
        };
        task = task.with_generated(generated);
        if let Some(domain) = &t.domain_id {
            if !curriculum.domains().iter().any(|d| &d.id == domain) {
                return Err(ManifestError::at(
                    format!("{path}.domain_id"),
                    format!("unknown domain `{domain}`"),
                ));
            }
            task = task.with_domain(domain.clone());
        }
        tasks.push(task);
    }
    EvaluationManifest::new(system, curriculum, tasks).map_err(|e| ManifestError::at("test_tasks", e))
}

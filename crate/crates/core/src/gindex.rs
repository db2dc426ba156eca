// SPDX-License-Identifier: Apache-2.0

//! Task contributions and the g-index.
//!
//! For a test task with performance `theta` and a curriculum of domains `C_i`,
//!
//! ```text
//! TC = sqrt( exp(12 * theta) * sum_i W(C_i) * GD(task, C_i) / (rho + E(C_i)) )
//! W(C)  = 1 / (1 + log2 |C|)
//! E(C)  = log2(compute_teraflops * training_seconds)
//! GD    = exp(10 * omega(task, C))
//! ```
//!
//! and the g-index is the mean contribution over the test set.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dag::ProgramDag;
use crate::divergence::{delta_for_unparseable, delta_with, DeltaOptions, DivergenceReport, ErrorBreakdown};
use crate::generalization::{
    classify_level, gd_with_exponent, omega_of, Curriculum, CurriculumDomain, GeneralizationError,
    GeneratedProgram, LevelTag, TaskInstance,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GIndexError {
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("rho + E is not positive for domain `{domain}` ({value})")]
    DenominatorNonPositive { domain: String, value: f64 },
    #[error("empty test set")]
    EmptyTestSet,
    #[error("empty list")]
    EmptyList,
    #[error("test task `{0}` has no generated program")]
    MissingGenerated(String),
    #[error("formula constants differ from the standard values but are not marked nonstandard")]
    UnmarkedNonstandardConstants,
    #[error(transparent)]
    Generalization(#[from] GeneralizationError),
}

/// Exponents of the contribution formula. Reports made with anything other
/// than the standard values are flagged `nonstandard`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormulaConstants {
    pub theta_exponent: f64,
    pub omega_exponent: f64,
    pub nonstandard: bool,
}

impl FormulaConstants {
    pub const STANDARD: FormulaConstants = FormulaConstants {
        theta_exponent: 12.0,
        omega_exponent: 10.0,
        nonstandard: false,
    };

    pub fn nonstandard(theta_exponent: f64, omega_exponent: f64) -> Self {
        FormulaConstants {
            theta_exponent,
            omega_exponent,
            nonstandard: true,
        }
    }

    pub fn validate(&self) -> Result<(), GIndexError> {
        let standard = self.theta_exponent == Self::STANDARD.theta_exponent
            && self.omega_exponent == Self::STANDARD.omega_exponent;
        if standard || self.nonstandard {
            Ok(())
        } else {
            Err(GIndexError::UnmarkedNonstandardConstants)
        }
    }
}

impl Default for FormulaConstants {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// The system under evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemDescriptor {
    pub name: String,
    priors_rho: f64,
    pub notes: String,
}

impl SystemDescriptor {
    pub const DEFAULT_RHO: f64 = 1.0;

    pub fn new(name: impl Into<String>, priors_rho: f64) -> Result<Self, GIndexError> {
        if !(priors_rho.is_finite() && priors_rho >= 0.0) {
            return Err(GIndexError::OutOfRange {
                what: "priors_rho",
                value: priors_rho,
            });
        }
        Ok(SystemDescriptor {
            name: name.into(),
            priors_rho,
            notes: String::new(),
        })
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    pub fn priors_rho(&self) -> f64 {
        self.priors_rho
    }
}

/// A system, the curriculum it was trained on, and its outputs on test tasks.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationManifest {
    pub system: SystemDescriptor,
    pub curriculum: Curriculum,
    test_tasks: Vec<TaskInstance>,
}

impl EvaluationManifest {
    pub fn new(
        system: SystemDescriptor,
        curriculum: Curriculum,
        test_tasks: Vec<TaskInstance>,
    ) -> Result<Self, GIndexError> {
        if let Some(t) = test_tasks.iter().find(|t| t.generated.is_none()) {
            return Err(GIndexError::MissingGenerated(t.id.clone()));
        }
        Ok(EvaluationManifest {
            system,
            curriculum,
            test_tasks,
        })
    }

    pub fn test_tasks(&self) -> &[TaskInstance] {
        &self.test_tasks
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GIndexOptions {
    pub delta: DeltaOptions,
    pub constants: FormulaConstants,
}

/// `1 / (1 + log2 n)`.
pub fn curriculum_weight(sample_count: u64) -> Result<f64, GIndexError> {
    if sample_count == 0 {
        return Err(GIndexError::OutOfRange {
            what: "sample_count",
            value: 0.0,
        });
    }
    Ok(1.0 / (1.0 + (sample_count as f64).log2()))
}

/// `log2(compute_power * training_time)`, teraFLOPS times seconds.
pub fn experience(compute_power: f64, training_time: f64) -> Result<f64, GIndexError> {
    let product = compute_power * training_time;
    if !(product.is_finite() && product >= 1.0) || compute_power <= 0.0 {
        return Err(GIndexError::OutOfRange {
            what: "compute_power * training_time",
            value: product,
        });
    }
    Ok(product.log2())
}

/// `1 - delta(reference, generated)`.
pub fn performance(generated: &ProgramDag, reference: &ProgramDag, options: &DeltaOptions) -> f64 {
    delta_with(reference, generated, options).theta()
}

/// One domain's inputs to a task contribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainTerm {
    pub domain_id: String,
    pub omega: f64,
    pub gd: f64,
    pub weight: f64,
    pub experience: f64,
}

impl DomainTerm {
    pub fn for_domain(
        reference: &ProgramDag,
        domain: &CurriculumDomain,
        options: &GIndexOptions,
    ) -> Result<Self, GIndexError> {
        let omega = omega_of(reference, domain, &options.delta)?;
        Ok(DomainTerm {
            domain_id: domain.id.clone(),
            omega,
            gd: gd_with_exponent(omega, options.constants.omega_exponent)?,
            weight: curriculum_weight(domain.sample_count())?,
            experience: experience(domain.compute_power(), domain.training_time())?,
        })
    }
}

/// The contribution formula over precomputed domain terms.
pub fn task_contribution_from_terms(
    theta: f64,
    terms: &[DomainTerm],
    rho: f64,
    constants: &FormulaConstants,
) -> Result<f64, GIndexError> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(GIndexError::OutOfRange {
            what: "theta",
            value: theta,
        });
    }
    let mut sum = 0.0;
    for term in terms {
        let denominator = rho + term.experience;
        if denominator.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(GIndexError::DenominatorNonPositive {
                domain: term.domain_id.clone(),
                value: denominator,
            });
        }
        sum += term.weight * term.gd / denominator;
    }
    Ok(((constants.theta_exponent * theta).exp() * sum).sqrt())
}

/// Scored result for one test task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskReport {
    pub task_id: String,
    pub theta: f64,
    pub delta: f64,
    pub exact: bool,
    pub errors: ErrorBreakdown,
    /// Distance to the whole curriculum.
    pub omega: f64,
    pub domains: Vec<DomainTerm>,
    pub tc: f64,
}

fn divergence_for(task: &TaskInstance, options: &DeltaOptions) -> Result<DivergenceReport, GIndexError> {
    match &task.generated {
        Some(GeneratedProgram::Program(generated)) => Ok(delta_with(task.reference(), generated, options)),
        Some(GeneratedProgram::Unparseable(_)) => Ok(delta_for_unparseable(task.reference())),
        None => Err(GIndexError::MissingGenerated(task.id.clone())),
    }
}

/// Scores one test task against the manifest's curriculum.
pub fn score_task(
    task: &TaskInstance,
    manifest: &EvaluationManifest,
    options: &GIndexOptions,
) -> Result<TaskReport, GIndexError> {
    options.constants.validate()?;
    let report = divergence_for(task, &options.delta)?;
    let domains = manifest
        .curriculum
        .domains()
        .iter()
        .map(|d| DomainTerm::for_domain(task.reference(), d, options))
        .collect::<Result<Vec<_>, _>>()?;
    let omega = domains.iter().map(|d| d.omega).fold(1.0, f64::min);
    let theta = report.theta();
    let tc = task_contribution_from_terms(theta, &domains, manifest.system.priors_rho(), &options.constants)?;
    Ok(TaskReport {
        task_id: task.id.clone(),
        theta,
        delta: report.delta,
        exact: report.exact,
        errors: report.errors,
        omega,
        domains,
        tc,
    })
}

/// Contribution of one test task.
pub fn task_contribution(
    task: &TaskInstance,
    manifest: &EvaluationManifest,
    options: &GIndexOptions,
) -> Result<f64, GIndexError> {
    Ok(score_task(task, manifest, options)?.tc)
}

/// Fraction of tasks solved perfectly.
pub fn skill_level(thetas: &[f64]) -> Result<f64, GIndexError> {
    if thetas.is_empty() {
        return Err(GIndexError::EmptyList);
    }
    Ok(thetas.iter().filter(|&&t| t == 1.0).count() as f64 / thetas.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GIndexReport {
    pub system: String,
    pub g_index: f64,
    pub mean_theta: f64,
    pub mean_omega: f64,
    pub skill_level: f64,
    pub level_tag: LevelTag,
    pub rho: f64,
    pub constants: FormulaConstants,
    /// False if any divergence was computed with an exhausted clique budget.
    pub exact: bool,
    pub per_task: Vec<TaskReport>,
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

/// Scores every test task in parallel and aggregates sequentially in
/// manifest order.
pub fn g_index(manifest: &EvaluationManifest, options: &GIndexOptions) -> Result<GIndexReport, GIndexError> {
    options.constants.validate()?;
    let tasks = manifest.test_tasks();
    if tasks.is_empty() {
        return Err(GIndexError::EmptyTestSet);
    }
    let per_task = tasks
        .par_iter()
        .map(|t| score_task(t, manifest, options))
        .collect::<Result<Vec<_>, _>>()?;
    let thetas: Vec<f64> = per_task.iter().map(|t| t.theta).collect();
    let mean_omega = mean(per_task.iter().map(|t| t.omega));
    Ok(GIndexReport {
        system: manifest.system.name.clone(),
        g_index: mean(per_task.iter().map(|t| t.tc)),
        mean_theta: mean(thetas.iter().copied()),
        mean_omega,
        skill_level: skill_level(&thetas)?,
        level_tag: classify_level(mean_omega)?,
        rho: manifest.system.priors_rho(),
        constants: options.constants,
        exact: per_task.iter().all(|t| t.exact),
        per_task,
    })
}

pub const REPORT_CSV_HEADER: [&str; 9] = [
    "task_id",
    "theta",
    "delta",
    "omega",
    "tc",
    "exact",
    "syntax_errors",
    "function_errors",
    "dataflow_errors",
];

impl GIndexReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per task.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(REPORT_CSV_HEADER).expect("in-memory write");
        for t in &self.per_task {
            writer
                .write_record([
                    t.task_id.clone(),
                    t.theta.to_string(),
                    t.delta.to_string(),
                    t.omega.to_string(),
                    t.tc.to_string(),
                    t.exact.to_string(),
                    t.errors.syntax.to_string(),
                    t.errors.function.to_string(),
                    t.errors.dataflow.to_string(),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

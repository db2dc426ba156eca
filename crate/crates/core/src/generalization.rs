// SPDX-License-Identifier: Apache-2.0

//! Domain distance, task-domain clustering and generalization difficulty.
//!
//! The domain distance of a task is the divergence between its reference
//! program and the nearest program in a pool (a curriculum, one curriculum
//! domain, or any list of programs). Generalization difficulty grows
//! exponentially with it.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dag::ProgramDag;
use crate::divergence::{delta_with, pairwise_matrix, DeltaOptions, ProgramLoadError};

/// Exponent applied to the domain distance in the difficulty term.
pub const DEFAULT_OMEGA_EXPONENT: f64 = 10.0;

/// Default task-domain threshold on complete-linkage divergence.
pub const DEFAULT_DOMAIN_THRESHOLD: f64 = 0.15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneralizationError {
    #[error("program pool is empty")]
    EmptyPool,
    #[error("{what} must lie in {range}, got {value}")]
    OutOfRange {
        what: &'static str,
        range: &'static str,
        value: f64,
    },
    #[error("task `{0}` has an empty reference program")]
    EmptyReference(String),
    #[error("curriculum has no domains")]
    EmptyCurriculum,
    #[error("duplicate curriculum domain id `{0}`")]
    DuplicateDomain(String),
    #[error("curriculum domain `{id}`: {reason}")]
    InvalidDomain { id: String, reason: String },
}

/// A generated program, or the reason it could not be loaded.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratedProgram {
    Program(ProgramDag),
    Unparseable(ProgramLoadError),
}

/// A task: its prompt, a reference solution, and optionally what a system
/// generated for it.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskInstance {
    pub id: String,
    pub spec_text: String,
    reference: ProgramDag,
    pub generated: Option<GeneratedProgram>,
    pub domain_id: Option<String>,
}

impl TaskInstance {
    pub fn new(
        id: impl Into<String>,
        spec_text: impl Into<String>,
        reference: ProgramDag,
    ) -> Result<Self, GeneralizationError> {
        let id = id.into();
        if reference.is_empty() {
            return Err(GeneralizationError::EmptyReference(id));
        }
        Ok(TaskInstance {
            id,
            spec_text: spec_text.into(),
            reference,
            generated: None,
            domain_id: None,
        })
    }

    pub fn with_generated(mut self, generated: GeneratedProgram) -> Self {
        self.generated = Some(generated);
        self
    }

    pub fn with_domain(mut self, domain_id: impl Into<String>) -> Self {
        self.domain_id = Some(domain_id.into());
        self
    }

    pub fn reference(&self) -> &ProgramDag {
        &self.reference
    }
}

/// Training tasks of one domain together with the resources spent on them.
#[derive(Debug, Clone, PartialEq)]
pub struct CurriculumDomain {
    pub id: String,
    pub tasks: Vec<TaskInstance>,
    sample_count: u64,
    compute_power: f64,
    training_time: f64,
}

impl CurriculumDomain {
    /// `compute_power` is in teraFLOPS and `training_time` in seconds; their
    /// product must be at least 1 so that experience is non-negative.
    pub fn new(
        id: impl Into<String>,
        tasks: Vec<TaskInstance>,
        sample_count: u64,
        compute_power: f64,
        training_time: f64,
    ) -> Result<Self, GeneralizationError> {
        let id = id.into();
        let invalid = |reason: String| GeneralizationError::InvalidDomain {
            id: id.clone(),
            reason,
        };
        if sample_count == 0 {
            return Err(invalid("sample_count must be at least 1".into()));
        }
        if !compute_power.is_finite() || !training_time.is_finite() {
            return Err(invalid("compute power and training time must be finite".into()));
        }
        let product = compute_power * training_time;
        if product < 1.0 || compute_power <= 0.0 {
            return Err(invalid(format!(
                "compute_power * training_time must be at least 1 teraFLOP-second, got {product}"
            )));
        }
        Ok(CurriculumDomain {
            id,
            tasks,
            sample_count,
            compute_power,
            training_time,
        })
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn compute_power(&self) -> f64 {
        self.compute_power
    }

    pub fn training_time(&self) -> f64 {
        self.training_time
    }
}

/// The training curriculum, partitioned into domains.
#[derive(Debug, Clone, PartialEq)]
pub struct Curriculum {
    domains: Vec<CurriculumDomain>,
}

impl Curriculum {
    pub fn new(domains: Vec<CurriculumDomain>) -> Result<Self, GeneralizationError> {
        if domains.is_empty() {
            return Err(GeneralizationError::EmptyCurriculum);
        }
        let mut seen = HashSet::new();
        for d in &domains {
            if !seen.insert(d.id.as_str()) {
                return Err(GeneralizationError::DuplicateDomain(d.id.clone()));
            }
        }
        Ok(Curriculum { domains })
    }

    pub fn domains(&self) -> &[CurriculumDomain] {
        &self.domains
    }
}

/// Anything that can serve as the comparison pool for a domain distance.
pub trait ProgramPool {
    fn reference_programs(&self) -> Vec<&ProgramDag>;
}

impl ProgramPool for CurriculumDomain {
    fn reference_programs(&self) -> Vec<&ProgramDag> {
        self.tasks.iter().map(TaskInstance::reference).collect()
    }
}

impl ProgramPool for Curriculum {
    fn reference_programs(&self) -> Vec<&ProgramDag> {
        self.domains
            .iter()
            .flat_map(|d| d.tasks.iter().map(TaskInstance::reference))
            .collect()
    }
}

impl ProgramPool for [ProgramDag] {
    fn reference_programs(&self) -> Vec<&ProgramDag> {
        self.iter().collect()
    }
}

impl ProgramPool for Vec<ProgramDag> {
    fn reference_programs(&self) -> Vec<&ProgramDag> {
        self.iter().collect()
    }
}

impl ProgramPool for [TaskInstance] {
    fn reference_programs(&self) -> Vec<&ProgramDag> {
        self.iter().map(TaskInstance::reference).collect()
    }
}

/// Domain distance: the smallest divergence between `reference` and any
/// program in the pool.
pub fn omega_of<P: ProgramPool + ?Sized>(
    reference: &ProgramDag,
    pool: &P,
    options: &DeltaOptions,
) -> Result<f64, GeneralizationError> {
    let programs = pool.reference_programs();
    if programs.is_empty() {
        return Err(GeneralizationError::EmptyPool);
    }
    Ok(programs
        .par_iter()
        .map(|p| delta_with(reference, p, options).delta)
        .reduce(|| 1.0, f64::min))
}

/// Domain distance of a task's reference program from a pool.
pub fn omega<P: ProgramPool + ?Sized>(
    task: &TaskInstance,
    pool: &P,
    options: &DeltaOptions,
) -> Result<f64, GeneralizationError> {
    omega_of(task.reference(), pool, options)
}

/// Generalization difficulty `exp(10 * omega)`.
pub fn gd(omega: f64) -> Result<f64, GeneralizationError> {
    gd_with_exponent(omega, DEFAULT_OMEGA_EXPONENT)
}

pub fn gd_with_exponent(omega: f64, exponent: f64) -> Result<f64, GeneralizationError> {
    check_unit_interval("omega", omega)?;
    Ok((exponent * omega).exp())
}

fn check_unit_interval(what: &'static str, value: f64) -> Result<(), GeneralizationError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(GeneralizationError::OutOfRange {
            what,
            range: "[0, 1]",
            value,
        })
    }
}

/// Generalization level implied by a mean domain distance. Levels are
/// ordered; transitional tags fill the gaps between the level bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LevelTag {
    /// No uncertainty at all; never derived from a domain distance.
    L0,
    L1,
    TransitionalL1L2,
    L2,
    TransitionalL2L3,
    L3,
}

impl LevelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            LevelTag::L0 => "L0",
            LevelTag::L1 => "L1",
            LevelTag::TransitionalL1L2 => "transitional(L1-L2)",
            LevelTag::L2 => "L2",
            LevelTag::TransitionalL2L3 => "transitional(L2-L3)",
            LevelTag::L3 => "L3",
        }
    }
}

impl fmt::Display for LevelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for LevelTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// L1 up to 0.15, L2 on [0.4, 0.7], L3 from 0.85; transitional in between.
pub fn classify_level(mean_omega: f64) -> Result<LevelTag, GeneralizationError> {
    check_unit_interval("mean omega", mean_omega)?;
    Ok(if mean_omega <= 0.15 {
        LevelTag::L1
    } else if mean_omega < 0.4 {
        LevelTag::TransitionalL1L2
    } else if mean_omega <= 0.7 {
        LevelTag::L2
    } else if mean_omega < 0.85 {
        LevelTag::TransitionalL2L3
    } else {
        LevelTag::L3
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub id: usize,
    /// Input indices, ascending.
    pub members: Vec<usize>,
}

/// A partition of a program list into task domains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainPartition {
    pub threshold: f64,
    /// Ordered by smallest member.
    pub clusters: Vec<Cluster>,
}

impl DomainPartition {
    /// Cluster id of every input index.
    pub fn assignment(&self) -> Vec<usize> {
        let n = self.clusters.iter().map(|c| c.members.len()).sum();
        let mut out = vec![0; n];
        for c in &self.clusters {
            for &m in &c.members {
                out[m] = c.id;
            }
        }
        out
    }
}

/// Groups programs into task domains by complete-linkage agglomerative
/// clustering on their pairwise divergences.
pub fn cluster_domains(
    programs: &[ProgramDag],
    threshold: f64,
    options: &DeltaOptions,
) -> Result<DomainPartition, GeneralizationError> {
    let matrix = pairwise_matrix(programs, programs, options);
    cluster_from_matrix(&matrix.values, threshold)
}

/// Complete-linkage clustering of a symmetric distance matrix. Clusters merge
/// while the closest pair's linkage (largest member-to-member distance) is at
/// most `threshold`; among equally close pairs the one with the lowest cluster
/// indices merges first.
pub fn cluster_from_matrix(
    distances: &[Vec<f64>],
    threshold: f64,
) -> Result<DomainPartition, GeneralizationError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(GeneralizationError::OutOfRange {
            what: "cluster threshold",
            range: "(0, 1)",
            value: threshold,
        });
    }
    let n = distances.len();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut linkage: Vec<Vec<f64>> = distances
        .iter()
        .enumerate()
        .map(|(i, row)| (0..n).map(|j| row[j].max(distances[j][i])).collect())
        .collect();
    let mut alive: Vec<usize> = (0..n).collect();

    loop {
        let mut closest: Option<(f64, usize, usize)> = None;
        for (x, &a) in alive.iter().enumerate() {
            for &b in &alive[x + 1..] {
                if closest.is_none_or(|(d, _, _)| linkage[a][b] < d) {
                    closest = Some((linkage[a][b], a, b));
                }
            }
        }
        match closest {
            Some((d, a, b)) if d <= threshold => {
                let absorbed = std::mem::take(&mut members[b]);
                members[a].extend(absorbed);
                members[a].sort_unstable();
                for &c in &alive {
                    let merged = linkage[a][c].max(linkage[b][c]);
                    linkage[a][c] = merged;
                    linkage[c][a] = merged;
                }
                alive.retain(|&c| c != b);
            }
            _ => break,
        }
    }

    // Representatives keep the smallest member index, so `alive` is already
    // ordered by smallest member.
    let clusters = alive
        .iter()
        .enumerate()
        .map(|(id, &rep)| Cluster {
            id,
            members: members[rep].clone(),
        })
        .collect();
    Ok(DomainPartition {
        threshold,
        clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::DagVertex;

    fn program(types: &[&str]) -> ProgramDag {
        ProgramDag::new(types.iter().map(|t| DagVertex::new(*t)).collect(), (1..types.len()).map(|i| (i - 1, i)))
            .unwrap()
    }

    #[test]
    fn omega_is_zero_for_a_seen_task() {
        let p = program(&["a", "b"]);
        let pool = vec![program(&["x"]), p.clone()];
        assert_eq!(omega_of(&p, &pool, &DeltaOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn omega_is_one_against_disjoint_pool() {
        let pool = vec![program(&["x"])];
        assert_eq!(omega_of(&program(&["a"]), &pool, &DeltaOptions::default()).unwrap(), 1.0);
    }

    #[test]
    fn omega_takes_the_minimum() {
        // Against [a, b, c]: [a] gives 1 - 1/3, [a, b] gives 1 - 4/6, [x] gives 1.
        let task = program(&["a", "b", "c"]);
        let pool = vec![program(&["a"]), program(&["a", "b"]), program(&["x"])];
        assert_eq!(
            omega_of(&task, &pool, &DeltaOptions::default()).unwrap(),
            1.0 - 4.0 / 6.0
        );
        let empty: Vec<ProgramDag> = Vec::new();
        assert_eq!(
            omega_of(&task, &empty, &DeltaOptions::default()),
            Err(GeneralizationError::EmptyPool)
        );
    }

    #[test]
    fn omega_min_of_given_distances() {
        let d = [0.4, 0.2, 0.9];
        assert_eq!(d.iter().copied().fold(1.0, f64::min), 0.2);
    }

    #[test]
    fn difficulty_values() {
        assert_eq!(gd(0.0).unwrap(), 1.0);
        assert!((gd(1.0).unwrap() - 22026.4658).abs() < 1e-4);
        assert!((gd(0.09).unwrap() - 2.4596).abs() < 1e-4);
        assert!(gd(1.5).is_err());
        assert!(gd(-0.1).is_err());
    }

    #[test]
    fn level_bands() {
        assert_eq!(classify_level(0.10).unwrap(), LevelTag::L1);
        assert_eq!(classify_level(0.55).unwrap(), LevelTag::L2);
        assert_eq!(classify_level(0.90).unwrap(), LevelTag::L3);
        assert_eq!(classify_level(0.3).unwrap(), LevelTag::TransitionalL1L2);
        assert_eq!(classify_level(0.8).unwrap(), LevelTag::TransitionalL2L3);
        assert!(classify_level(1.2).is_err());
        let mut previous = LevelTag::L0;
        for k in 0..=1000 {
            let level = classify_level(k as f64 / 1000.0).unwrap();
            assert!(level >= previous);
            previous = level;
        }
    }

    #[test]
    fn clustering_extremes() {
        let zeros = vec![vec![0.0; 4]; 4];
        assert_eq!(cluster_from_matrix(&zeros, 0.15).unwrap().clusters.len(), 1);
        let mut ones = vec![vec![1.0; 4]; 4];
        for (i, row) in ones.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        assert_eq!(cluster_from_matrix(&ones, 0.15).unwrap().clusters.len(), 4);
        assert!(cluster_from_matrix(&ones, 1.0).is_err());
    }

    #[test]
    fn complete_linkage_blocks_chaining() {
        // 0-1 and 1-2 are close but 0-2 is not; single linkage would chain all three.
        let d = vec![
            vec![0.0, 0.1, 0.3],
            vec![0.1, 0.0, 0.12],
            vec![0.3, 0.12, 0.0],
        ];
        let p = cluster_from_matrix(&d, 0.15).unwrap();
        assert_eq!(p.clusters.len(), 2);
        assert_eq!(p.clusters[0].members, vec![0, 1]);
        assert_eq!(p.assignment(), vec![0, 0, 1]);
    }

    #[test]
    fn curriculum_validation() {
        assert!(CurriculumDomain::new("d", vec![], 0, 1.0, 1.0).is_err());
        assert!(CurriculumDomain::new("d", vec![], 1, 0.5, 1.0).is_err());
        assert!(Curriculum::new(vec![]).is_err());
        let d = CurriculumDomain::new("d", vec![], 1, 1.0, 1.0).unwrap();
        assert_eq!(
            Curriculum::new(vec![d.clone(), d]),
            Err(GeneralizationError::DuplicateDomain("d".into()))
        );
        assert!(TaskInstance::new("t", "", ProgramDag::empty()).is_err());
    }
}

// SPDX-License-Identifier: Apache-2.0

use num_integer::Integer;
use rayon::prelude::*;
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use super::association::{build_association_graph, AssociationGraph};
use super::clique::{self, DEFAULT_CLIQUE_BUDGET};
use super::errors::{classify_errors, ErrorBreakdown};
use super::similarity::NodeSimilarity;
use super::DivergenceError;
use crate::dag::{build_dag, ProgramDag};
use crate::flow::{parse_flow, FlowError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaOptions {
    /// Search-node budget for the clique search.
    pub clique_budget: u64,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        DeltaOptions {
            clique_budget: DEFAULT_CLIQUE_BUDGET,
        }
    }
}

/// One pair of the optimal mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappedPair {
    pub left: usize,
    pub right: usize,
    pub similarity: NodeSimilarity,
}

/// A node-weighted maximum clique of an association graph, read back as a
/// vertex mapping between the two compared structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueResult {
    /// Association-vertex indices, ascending.
    pub members: Vec<usize>,
    /// Mapping pairs, ascending by `left`.
    pub pairs: Vec<MappedPair>,
    weight_numerator: u128,
    weight_denominator: u128,
    pub exact: bool,
}

impl CliqueResult {
    pub fn empty() -> Self {
        CliqueResult {
            members: Vec::new(),
            pairs: Vec::new(),
            weight_numerator: 0,
            weight_denominator: 1,
            exact: true,
        }
    }

    /// Sum of member similarities as a reduced fraction.
    pub fn weight_fraction(&self) -> (u128, u128) {
        (self.weight_numerator, self.weight_denominator)
    }

    pub fn total_weight(&self) -> f64 {
        self.weight_numerator as f64 / self.weight_denominator as f64
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Fails with [`DivergenceError::BudgetExhausted`] when optimality was
    /// not proven.
    pub fn require_exact(&self) -> Result<&Self, DivergenceError> {
        if self.exact {
            Ok(self)
        } else {
            Err(DivergenceError::BudgetExhausted)
        }
    }
}

/// Solves the association graph and converts the clique into a mapping.
pub fn max_weight_clique(graph: &AssociationGraph, budget: u64) -> CliqueResult {
    let solution = clique::solve(graph.weighted_graph(), budget);
    let pairs = solution
        .members
        .iter()
        .map(|&m| {
            let v = graph.vertices()[m];
            MappedPair {
                left: v.left,
                right: v.right,
                similarity: v.similarity,
            }
        })
        .collect();
    let den = graph.weight_denominator() as u128;
    let g = solution.weight.gcd(&den).max(1);
    CliqueResult {
        members: solution.members,
        pairs,
        weight_numerator: solution.weight / g,
        weight_denominator: den / g,
        exact: solution.exact && graph.has_exact_weights(),
    }
}

/// `1 - s^2 / (left_len * right_len)` for the similarity sum
/// `s = numerator / denominator`; 1 when either side is empty.
///
/// Every route to the metric goes through this function, so equal exact sums
/// always produce bit-identical values.
pub fn delta_from_weight_sum(
    numerator: u128,
    denominator: u128,
    left_len: usize,
    right_len: usize,
) -> f64 {
    if left_len == 0 || right_len == 0 {
        return 1.0;
    }
    let g = numerator.gcd(&denominator).max(1);
    let s = (numerator / g) as f64 / (denominator / g) as f64;
    (1.0 - (s * s) / (left_len as f64 * right_len as f64)).clamp(0.0, 1.0)
}

/// Result of comparing two DAGs.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub delta: f64,
    /// False when the clique search ran out of budget; `delta` is then an
    /// upper bound on the true value.
    pub exact: bool,
    pub mapping: CliqueResult,
    pub errors: ErrorBreakdown,
}

impl DivergenceReport {
    /// Performance: `1 - delta`.
    pub fn theta(&self) -> f64 {
        1.0 - self.delta
    }
}

struct MappingView<'a>(&'a [MappedPair]);

impl Serialize for MappingView<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for pair in self.0 {
            seq.serialize_element(&(pair.left, pair.right, pair.similarity.value()))?;
        }
        seq.end()
    }
}

impl Serialize for DivergenceReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DivergenceReport", 4)?;
        s.serialize_field("delta", &self.delta)?;
        s.serialize_field("exact", &self.exact)?;
        s.serialize_field("mapping", &MappingView(&self.mapping.pairs))?;
        s.serialize_field("errors", &self.errors)?;
        s.end()
    }
}

/// Divergence between two DAGs with the default clique budget. The first
/// argument is treated as the reference when classifying errors.
pub fn delta(first: &ProgramDag, second: &ProgramDag) -> DivergenceReport {
    delta_with(first, second, &DeltaOptions::default())
}

pub fn delta_with(first: &ProgramDag, second: &ProgramDag, options: &DeltaOptions) -> DivergenceReport {
    if first.is_empty() || second.is_empty() {
        let mapping = CliqueResult::empty();
        let errors = classify_errors(first, second, &mapping, 0);
        return DivergenceReport {
            delta: 1.0,
            exact: true,
            mapping,
            errors,
        };
    }
    let graph = build_association_graph(first, second);
    let mapping = max_weight_clique(&graph, options.clique_budget);
    let (num, den) = mapping.weight_fraction();
    let errors = classify_errors(first, second, &mapping, 0);
    DivergenceReport {
        delta: delta_from_weight_sum(num, den, first.len(), second.len()),
        exact: mapping.exact,
        mapping,
        errors,
    }
}

/// Report for a generated program that failed to parse: compared against an
/// empty DAG, so delta is 1, and one syntax error is recorded.
pub fn delta_for_unparseable(reference: &ProgramDag) -> DivergenceReport {
    let mapping = CliqueResult::empty();
    let errors = classify_errors(reference, &ProgramDag::empty(), &mapping, 1);
    DivergenceReport {
        delta: 1.0,
        exact: true,
        mapping,
        errors,
    }
}

/// Parses a document into a DAG; flow and DAG errors are reported as text.
pub fn dag_from_text(text: &str) -> Result<ProgramDag, ProgramLoadError> {
    let program = parse_flow(text)?;
    Ok(build_dag(&program)?)
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ProgramLoadError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Dag(#[from] crate::dag::DagError),
}

/// Outcome of scoring a generated document against a reference document.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDocuments {
    pub report: DivergenceReport,
    /// Set when the generated document could not be turned into a DAG.
    pub generated_error: Option<ProgramLoadError>,
}

/// Scores generated text against reference text. A reference that fails to
/// load is an error; a generated program that fails scores delta 1 with a
/// syntax error counted.
pub fn score_documents(
    reference: &str,
    generated: &str,
    options: &DeltaOptions,
) -> Result<ScoredDocuments, ProgramLoadError> {
    let reference = dag_from_text(reference)?;
    Ok(match dag_from_text(generated) {
        Ok(generated) => ScoredDocuments {
            report: delta_with(&reference, &generated, options),
            generated_error: None,
        },
        Err(e) => ScoredDocuments {
            report: delta_for_unparseable(&reference),
            generated_error: Some(e),
        },
    })
}

/// Divergence matrix between two sets of programs.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaMatrix {
    pub values: Vec<Vec<f64>>,
    /// True when every cell was computed exactly.
    pub exact: bool,
}

pub fn pairwise_matrix(rows: &[ProgramDag], columns: &[ProgramDag], options: &DeltaOptions) -> DeltaMatrix {
    if columns.is_empty() {
        return DeltaMatrix {
            values: vec![Vec::new(); rows.len()],
            exact: true,
        };
    }
    let cells: Vec<(f64, bool)> = (0..rows.len() * columns.len())
        .into_par_iter()
        .map(|k| {
            let r = delta_with(&rows[k / columns.len()], &columns[k % columns.len()], options);
            (r.delta, r.exact)
        })
        .collect();
    DeltaMatrix {
        exact: cells.iter().all(|c| c.1),
        values: cells
            .chunks(columns.len())
            .map(|row| row.iter().map(|c| c.0).collect())
            .collect(),
    }
}

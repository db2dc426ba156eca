// SPDX-License-Identifier: Apache-2.0

//! The match-based divergence metric between program DAGs.
//!
//! Two DAGs are compared by building an association graph whose vertices are
//! same-type node pairings weighted by attribute similarity, and whose edges
//! join pairings that agree on wiring. A node-weighted maximum clique of that
//! graph is the best common substructure, and
//!
//! ```text
//! delta = 1 - (sum of clique weights)^2 / (|V1| * |V2|)
//! ```
//!
//! The value lies in `[0, 1]`, is symmetric, is 0 only for identical programs
//! and 1 when the programs share no node at all (or either is empty).

pub mod association;
pub mod clique;
pub mod errors;
pub mod metric;
pub mod oracle;
pub mod similarity;

use thiserror::Error;

pub use association::{build_association_graph, AssociationGraph, AssociationVertex};
pub use clique::{WeightedGraph, DEFAULT_CLIQUE_BUDGET};
pub use errors::{classify_errors, ErrorBreakdown};
pub use metric::{
    dag_from_text, delta, delta_for_unparseable, delta_from_weight_sum, delta_with,
    max_weight_clique, pairwise_matrix, score_documents, CliqueResult, DeltaMatrix, DeltaOptions,
    DivergenceReport, MappedPair, ProgramLoadError, ScoredDocuments,
};
pub use oracle::delta_brute_force;
pub use similarity::{delta_single, node_similarity, NodeSimilarity};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DivergenceError {
    #[error("clique search budget exhausted before optimality was proven")]
    BudgetExhausted,
    #[error("exhaustive search limited to |V1|*|V2| <= 64, got {left}x{right}")]
    TooLarge { left: usize, right: usize },
}

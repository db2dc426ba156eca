// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::metric::CliqueResult;
use super::similarity::node_similarity;
use crate::dag::ProgramDag;

/// Counts of discrepancies between a generated program and its reference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    /// The generated document failed to parse.
    pub syntax: u32,
    /// Reference nodes missing from the generated program, or present with
    /// differing attributes.
    pub function: u32,
    /// Edges present on one side but not the other, among matched nodes.
    pub dataflow: u32,
}

/// Classifies errors of `generated` relative to `reference`.
///
/// The clique mapping only pairs nodes whose wiring agrees, so a rewired but
/// otherwise intact node would look missing. The mapping is therefore first
/// completed node-wise: unmatched reference nodes are paired greedily with
/// unmatched generated nodes of the same type, best similarity first. Function
/// errors are then reference nodes left unpaired or paired with `w < 1`;
/// dataflow errors are edges between paired nodes that exist on only one side.
pub fn classify_errors(
    reference: &ProgramDag,
    generated: &ProgramDag,
    mapping: &CliqueResult,
    syntax_errors: u32,
) -> ErrorBreakdown {
    let mut forward: Vec<Option<usize>> = vec![None; reference.len()];
    let mut backward: Vec<Option<usize>> = vec![None; generated.len()];
    for pair in &mapping.pairs {
        forward[pair.left] = Some(pair.right);
        backward[pair.right] = Some(pair.left);
    }

    let mut candidates = Vec::new();
    for r in (0..reference.len()).filter(|&r| forward[r].is_none()) {
        for g in (0..generated.len()).filter(|&g| backward[g].is_none()) {
            let w = node_similarity(reference.vertex(r), generated.vertex(g));
            if !w.is_zero() {
                candidates.push((w, r, g));
            }
        }
    }
    // Highest similarity first; exact fraction comparison via cross-multiplication.
    candidates.sort_by(|a, b| {
        let lhs = b.0.numerator() as u64 * a.0.denominator() as u64;
        let rhs = a.0.numerator() as u64 * b.0.denominator() as u64;
        lhs.cmp(&rhs).then((a.1, a.2).cmp(&(b.1, b.2)))
    });
    for (_, r, g) in candidates {
        if forward[r].is_none() && backward[g].is_none() {
            forward[r] = Some(g);
            backward[g] = Some(r);
        }
    }

    let function = (0..reference.len())
        .filter(|&r| match forward[r] {
            None => true,
            Some(g) => !node_similarity(reference.vertex(r), generated.vertex(g)).is_one(),
        })
        .count() as u32;

    let missing = reference
        .edges()
        .iter()
        .filter(|&&(a, b)| match (forward[a], forward[b]) {
            (Some(x), Some(y)) => !generated.has_edge(x, y),
            _ => false,
        })
        .count();
    let extra = generated
        .edges()
        .iter()
        .filter(|&&(x, y)| match (backward[x], backward[y]) {
            (Some(a), Some(b)) => !reference.has_edge(a, b),
            _ => false,
        })
        .count();

    ErrorBreakdown {
        syntax: syntax_errors,
        function,
        dataflow: (missing + extra) as u32,
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Divergence between flatland programs, computed on flattened command lists.
//!
//! Commands of the same kind are paired with similarity 1 when their single
//! parameters agree (within 1e-9) and 0 otherwise. Compatible pairings must
//! preserve list order, so a clique of the association graph is exactly a
//! common subsequence and the maximum clique weight is the longest common
//! subsequence length. [`list_delta`] computes it by dynamic programming;
//! [`list_delta_via_clique`] goes through the association graph.

use crate::divergence::{
    delta_from_weight_sum, max_weight_clique, AssociationGraph, AssociationVertex, CliqueResult, NodeSimilarity,
};

use super::program::{Command, FlatlandProgram};

const PARAMETER_TOLERANCE: f64 = 1e-9;

pub fn command_similarity(a: &Command, b: &Command) -> NodeSimilarity {
    let close = |x: f64, y: f64| (x - y).abs() <= PARAMETER_TOLERANCE;
    match (a, b) {
        (Command::Move(x), Command::Move(y)) | (Command::Turn(x), Command::Turn(y)) if close(*x, *y) => {
            NodeSimilarity::ONE
        }
        _ => NodeSimilarity::ZERO,
    }
}

fn lcs_table(a: &[Command], b: &[Command]) -> Vec<Vec<u32>> {
    let mut table = vec![vec![0u32; b.len() + 1]; a.len() + 1];
    for i in (0..a.len()).rev() {
        for j in (0..b.len()).rev() {
            table[i][j] = if command_similarity(&a[i], &b[j]).is_one() {
                table[i + 1][j + 1] + 1
            } else {
                table[i + 1][j].max(table[i][j + 1])
            };
        }
    }
    table
}

/// An optimal order-preserving matching, as `(i, j)` pairs with both indices
/// strictly increasing.
pub fn list_alignment(a: &[Command], b: &[Command]) -> Vec<(usize, usize)> {
    let table = lcs_table(a, b);
    let (mut i, mut j) = (0, 0);
    let mut pairs = Vec::new();
    while i < a.len() && j < b.len() {
        if command_similarity(&a[i], &b[j]).is_one() && table[i][j] == table[i + 1][j + 1] + 1 {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if table[i + 1][j] >= table[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    pairs
}

pub fn list_delta(a: &[Command], b: &[Command]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let matched = lcs_table(a, b)[0][0];
    delta_from_weight_sum(matched as u128, 1, a.len(), b.len())
}

/// The same quantity through an order-preserving association graph and the
/// clique search.
pub fn list_delta_via_clique(a: &[Command], b: &[Command], budget: u64) -> (f64, CliqueResult) {
    if a.is_empty() || b.is_empty() {
        return (1.0, CliqueResult::empty());
    }
    let candidates = (0..a.len()).flat_map(|i| {
        (0..b.len()).map(move |j| AssociationVertex {
            left: i,
            right: j,
            similarity: command_similarity(&a[i], &b[j]),
        })
    });
    let graph = AssociationGraph::from_parts(candidates, |u, v| {
        u.left != v.left && u.right != v.right && ((u.left < v.left) == (u.right < v.right))
    });
    let clique = max_weight_clique(&graph, budget);
    let (num, den) = clique.weight_fraction();
    (delta_from_weight_sum(num, den, a.len(), b.len()), clique)
}

pub fn flatland_delta(first: &FlatlandProgram, second: &FlatlandProgram) -> f64 {
    list_delta(&first.flatten(), &second.flatten())
}

pub fn flatland_delta_via_clique(first: &FlatlandProgram, second: &FlatlandProgram, budget: u64) -> (f64, CliqueResult) {
    list_delta_via_clique(&first.flatten(), &second.flatten(), budget)
}

// SPDX-License-Identifier: Apache-2.0

//! Exhaustive reference computation of the divergence metric.
//!
//! Enumerates every injective, type-consistent, structure-preserving partial
//! mapping between two small DAGs directly, without building an association
//! graph or running a clique search, and keeps the largest similarity sum in
//! exact rational arithmetic. Used to cross-check [`super::delta`].

use num_rational::Ratio;

use super::metric::delta_from_weight_sum;
use super::similarity::node_similarity;
use super::DivergenceError;
use crate::dag::ProgramDag;

/// Largest `|V1| * |V2|` accepted by the exhaustive search.
pub const BRUTE_FORCE_LIMIT: usize = 64;

/// Divergence by exhaustive enumeration of partial mappings.
pub fn delta_brute_force(first: &ProgramDag, second: &ProgramDag) -> Result<f64, DivergenceError> {
    let best = best_weight_sum(first, second)?;
    Ok(delta_from_weight_sum(
        *best.numer(),
        *best.denom(),
        first.len(),
        second.len(),
    ))
}

/// The maximal similarity sum over all valid partial mappings.
pub fn best_weight_sum(first: &ProgramDag, second: &ProgramDag) -> Result<Ratio<u128>, DivergenceError> {
    if first.len() * second.len() > BRUTE_FORCE_LIMIT {
        return Err(DivergenceError::TooLarge {
            left: first.len(),
            right: second.len(),
        });
    }
    let weights: Vec<Vec<Ratio<u128>>> = first
        .vertices()
        .iter()
        .map(|a| {
            second
                .vertices()
                .iter()
                .map(|b| {
                    let w = node_similarity(a, b);
                    Ratio::new(w.numerator() as u128, w.denominator() as u128)
                })
                .collect()
        })
        .collect();
    let mut enumeration = Enumeration {
        first,
        second,
        weights,
        image: vec![None; first.len()],
        used: vec![false; second.len()],
        best: Ratio::from_integer(0),
    };
    enumeration.extend(0, Ratio::from_integer(0));
    Ok(enumeration.best)
}

struct Enumeration<'a> {
    first: &'a ProgramDag,
    second: &'a ProgramDag,
    weights: Vec<Vec<Ratio<u128>>>,
    image: Vec<Option<usize>>,
    used: Vec<bool>,
    best: Ratio<u128>,
}

impl Enumeration<'_> {
    fn extend(&mut self, vertex: usize, sum: Ratio<u128>) {
        if vertex == self.first.len() {
            if sum > self.best {
                self.best = sum;
            }
            return;
        }
        // Leave `vertex` unmapped.
        self.extend(vertex + 1, sum);
        for target in 0..self.second.len() {
            let w = self.weights[vertex][target];
            if self.used[target] || w == Ratio::from_integer(0) || !self.consistent(vertex, target) {
                continue;
            }
            self.image[vertex] = Some(target);
            self.used[target] = true;
            self.extend(vertex + 1, sum + w);
            self.used[target] = false;
            self.image[vertex] = None;
        }
    }

    /// Checks that mapping `vertex -> target` preserves edges, in both
    /// directions, against every vertex mapped so far.
    fn consistent(&self, vertex: usize, target: usize) -> bool {
        (0..vertex).all(|earlier| match self.image[earlier] {
            None => true,
            Some(mapped) => {
                self.first.has_edge(earlier, vertex) == self.second.has_edge(mapped, target)
                    && self.first.has_edge(vertex, earlier) == self.second.has_edge(target, mapped)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::DagVertex;

    fn chain(types: &[&str]) -> ProgramDag {
        let vertices = types.iter().map(|t| DagVertex::new(*t)).collect();
        ProgramDag::new(vertices, (1..types.len()).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn identical_chain() {
        let g = chain(&["a", "b", "c"]);
        assert_eq!(delta_brute_force(&g, &g).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_types() {
        assert_eq!(delta_brute_force(&chain(&["a"]), &chain(&["b", "c"])).unwrap(), 1.0);
    }

    #[test]
    fn chain_against_shorter_chain() {
        let best = best_weight_sum(&chain(&["A", "B", "C"]), &chain(&["A", "B"])).unwrap();
        assert_eq!(best, Ratio::from_integer(2));
        assert_eq!(
            delta_brute_force(&chain(&["A", "B", "C"]), &chain(&["A", "B"])).unwrap(),
            1.0 - 4.0 / 6.0
        );
    }

    #[test]
    fn rejects_large_inputs() {
        let big = chain(&["a"; 9]);
        assert_eq!(
            delta_brute_force(&big, &big),
            Err(DivergenceError::TooLarge { left: 9, right: 9 })
        );
    }
}

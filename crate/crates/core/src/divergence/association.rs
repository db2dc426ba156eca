// SPDX-License-Identifier: Apache-2.0

use num_integer::Integer;

use super::clique::WeightedGraph;
use super::similarity::{node_similarity, NodeSimilarity};
use crate::dag::ProgramDag;

/// Weight denominators above this are quantized instead of kept exact.
const MAX_EXACT_DENOMINATOR: u64 = 1 << 40;

/// A candidate pairing of vertex `left` (first graph) with vertex `right`
/// (second graph).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssociationVertex {
    pub left: usize,
    pub right: usize,
    pub similarity: NodeSimilarity,
}

/// Association graph between two structures. Vertices are pairings with
/// positive similarity, ordered by `(left, right)`; edges join pairings that
/// can coexist in one structure-preserving injective mapping.
#[derive(Debug, Clone)]
pub struct AssociationGraph {
    vertices: Vec<AssociationVertex>,
    graph: WeightedGraph,
    denominator: u64,
    exact_weights: bool,
}

impl AssociationGraph {
    /// Builds the graph from candidate pairings and a compatibility rule.
    /// Pairings with zero similarity are dropped.
    pub fn from_parts(
        candidates: impl IntoIterator<Item = AssociationVertex>,
        compatible: impl Fn(&AssociationVertex, &AssociationVertex) -> bool,
    ) -> Self {
        let vertices: Vec<AssociationVertex> = candidates
            .into_iter()
            .filter(|v| !v.similarity.is_zero())
            .collect();

        let lcm = vertices
            .iter()
            .try_fold(1u64, |acc, v| {
                let l = acc.lcm(&(v.similarity.denominator() as u64));
                (l <= MAX_EXACT_DENOMINATOR).then_some(l)
            });
        let (denominator, exact_weights) = match lcm {
            Some(l) => (l, true),
            None => (MAX_EXACT_DENOMINATOR, false),
        };
        let weights = vertices
            .iter()
            .map(|v| scale_weight(v.similarity, denominator))
            .collect();

        let mut graph = WeightedGraph::new(weights);
        for a in 0..vertices.len() {
            for b in a + 1..vertices.len() {
                if compatible(&vertices[a], &vertices[b]) {
                    graph.add_edge(a, b);
                }
            }
        }
        AssociationGraph {
            vertices,
            graph,
            denominator,
            exact_weights,
        }
    }

    pub fn vertices(&self) -> &[AssociationVertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.graph.is_adjacent(a, b)
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Integer-weighted view used by the clique search; weight `k` stands for
    /// `k / weight_denominator()`.
    pub fn weighted_graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn weight_denominator(&self) -> u64 {
        self.denominator
    }

    /// False only when similarity denominators were too large to share a
    /// common exact scale and weights were rounded.
    pub fn has_exact_weights(&self) -> bool {
        self.exact_weights
    }
}

fn scale_weight(similarity: NodeSimilarity, denominator: u64) -> u64 {
    let num = similarity.numerator() as u128 * denominator as u128;
    let den = similarity.denominator() as u128;
    if num.is_multiple_of(den) {
        (num / den) as u64
    } else {
        // Only reached when quantizing; round half up and keep the pairing alive.
        (((2 * num + den) / (2 * den)) as u64).max(1)
    }
}

/// Association graph of two DAGs. Pairings `(i1, j1)` and `(i2, j2)` are
/// adjacent iff `i1 != i2`, `j1 != j2`, and the directed edge relation agrees
/// in both orientations: `(i1,i2) in E1 <=> (j1,j2) in E2` and
/// `(i2,i1) in E1 <=> (j2,j1) in E2`.
pub fn build_association_graph(first: &ProgramDag, second: &ProgramDag) -> AssociationGraph {
    let candidates = (0..first.len()).flat_map(|i| {
        (0..second.len()).map(move |j| AssociationVertex {
            left: i,
            right: j,
            similarity: node_similarity(first.vertex(i), second.vertex(j)),
        })
    });
    AssociationGraph::from_parts(candidates, |a, b| {
        a.left != b.left
            && a.right != b.right
            && first.has_edge(a.left, b.left) == second.has_edge(a.right, b.right)
            && first.has_edge(b.left, a.left) == second.has_edge(b.right, a.right)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::DagVertex;

    fn chain(types: &[&str]) -> ProgramDag {
        let vertices = types.iter().map(|t| DagVertex::new(*t)).collect();
        let edges = (1..types.len()).map(|i| (i - 1, i));
        ProgramDag::new(vertices, edges).unwrap()
    }

    #[test]
    fn disjoint_types_give_no_vertices() {
        let ag = build_association_graph(&chain(&["a", "b"]), &chain(&["c", "d"]));
        assert!(ag.is_empty());
    }

    #[test]
    fn single_nodes_of_same_type() {
        let ag = build_association_graph(&chain(&["a"]), &chain(&["a"]));
        assert_eq!(ag.len(), 1);
        assert_eq!(ag.edge_count(), 0);
    }

    #[test]
    fn two_chains_of_identical_nodes() {
        // Vertices in (left, right) order: (0,0), (0,1), (1,0), (1,1).
        // By hand over the 6 pairs:
        //   (0,0)-(0,1): share left        -> no
        //   (0,0)-(1,0): share right       -> no
        //   (0,0)-(1,1): 0->1 in both      -> yes
        //   (0,1)-(1,0): 0->1 vs 1->0      -> no
        //   (0,1)-(1,1): share right       -> no
        //   (1,0)-(1,1): share left        -> no
        let ag = build_association_graph(&chain(&["t", "t"]), &chain(&["t", "t"]));
        assert_eq!(ag.len(), 4);
        assert_eq!(ag.edge_count(), 1);
        assert!(ag.is_adjacent(0, 3));
    }

    #[test]
    fn weights_share_a_common_denominator() {
        let a = ProgramDag::new(
            vec![
                DagVertex::new("t").with_attribute("x", 1).with_attribute("y", 2),
                DagVertex::new("u")
                    .with_attribute("x", 1)
                    .with_attribute("y", 2)
                    .with_attribute("z", 3),
            ],
            [],
        )
        .unwrap();
        let b = ProgramDag::new(
            vec![
                DagVertex::new("t").with_attribute("x", 1).with_attribute("y", 0),
                DagVertex::new("u")
                    .with_attribute("x", 1)
                    .with_attribute("y", 0)
                    .with_attribute("z", 0),
            ],
            [],
        )
        .unwrap();
        let ag = build_association_graph(&a, &b);
        assert_eq!(ag.weight_denominator(), 6);
        let g = ag.weighted_graph();
        assert_eq!((g.weight(0), g.weight(1)), (3, 2));
        assert!(ag.has_exact_weights());
    }
}

// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use num_integer::Integer;

use crate::dag::DagVertex;

/// Node similarity `w`, kept as an exact fraction `matched / compared`.
///
/// Exactness matters: the clique search sums these values, and two routes to
/// the same optimum must produce bit-identical metric values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeSimilarity {
    matched: u32,
    compared: u32,
}

impl NodeSimilarity {
    pub const ZERO: NodeSimilarity = NodeSimilarity {
        matched: 0,
        compared: 1,
    };
    pub const ONE: NodeSimilarity = NodeSimilarity {
        matched: 1,
        compared: 1,
    };

    /// `matched / compared`, reduced. `compared` must be nonzero and not
    /// smaller than `matched`.
    pub fn new(matched: u32, compared: u32) -> Self {
        assert!(compared > 0 && matched <= compared, "similarity must lie in [0, 1]");
        let g = matched.gcd(&compared);
        NodeSimilarity {
            matched: matched / g,
            compared: compared / g,
        }
    }

    pub fn numerator(self) -> u32 {
        self.matched
    }

    pub fn denominator(self) -> u32 {
        self.compared
    }

    pub fn value(self) -> f64 {
        self.matched as f64 / self.compared as f64
    }

    pub fn is_zero(self) -> bool {
        self.matched == 0
    }

    pub fn is_one(self) -> bool {
        self.matched == self.compared
    }
}

impl fmt::Display for NodeSimilarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.matched, self.compared)
    }
}

/// Compares two vertices: zero across types, otherwise the fraction of
/// attribute keys whose values are deeply equal. A key present on only one
/// side counts as a mismatch; two attribute-free nodes of one type match fully.
pub fn node_similarity(a: &DagVertex, b: &DagVertex) -> NodeSimilarity {
    if a.node_type != b.node_type {
        return NodeSimilarity::ZERO;
    }
    let mut compared = 0u32;
    let mut matched = 0u32;
    for (key, value) in &a.attributes {
        compared += 1;
        if b.attributes.get(key) == Some(value) {
            matched += 1;
        }
    }
    compared += b
        .attributes
        .keys()
        .filter(|k| !a.attributes.contains_key(*k))
        .count() as u32;
    if compared == 0 {
        return NodeSimilarity::ONE;
    }
    NodeSimilarity::new(matched, compared)
}

/// Divergence between two single-node, edge-free graphs: `1 - w^2`.
pub fn delta_single(a: &DagVertex, b: &DagVertex) -> f64 {
    let w = node_similarity(a, b).value();
    1.0 - w * w
}

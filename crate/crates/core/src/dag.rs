// SPDX-License-Identifier: Apache-2.0

//! Attributed directed acyclic graphs built from flow programs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::flow::FlowProgram;
use crate::value::AttributeValue;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DagError {
    #[error("edge ({source_index}, {target}) references a vertex outside 0..{len}")]
    EdgeOutOfRange {
        source_index: usize,
        target: usize,
        len: usize,
    },
    #[error("wire graph contains a directed cycle through `{0}`")]
    CycleDetected(String),
}

/// A vertex: the node type plus its canonical attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct DagVertex {
    pub node_type: String,
    pub attributes: BTreeMap<String, AttributeValue>,
}

impl DagVertex {
    pub fn new(node_type: impl Into<String>) -> Self {
        DagVertex {
            node_type: node_type.into(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_attribute(mut self, key: impl Into<String>, value: impl Into<AttributeValue>) -> Self {
        self.attributes.insert(key.into(), value.into());
        self
    }
}

/// An attributed DAG. Edges are a set of ordered vertex-index pairs with no
/// self-loops and no directed cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramDag {
    vertices: Vec<DagVertex>,
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    // Dense row-major adjacency; graphs here are small.
    adjacency: Vec<bool>,
}

impl ProgramDag {
    /// Builds a DAG with vertex labels `v0, v1, ...`.
    pub fn new(
        vertices: Vec<DagVertex>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DagError> {
        let labels = (0..vertices.len()).map(|i| format!("v{i}")).collect();
        Self::with_labels(vertices, labels, edges)
    }

    pub fn with_labels(
        vertices: Vec<DagVertex>,
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DagError> {
        assert_eq!(vertices.len(), labels.len(), "one label per vertex");
        let n = vertices.len();
        let mut edge_set = BTreeSet::new();
        for (source, target) in edges {
            if source >= n || target >= n {
                return Err(DagError::EdgeOutOfRange {
                    source_index: source,
                    target,
                    len: n,
                });
            }
            if source == target {
                return Err(DagError::CycleDetected(labels[source].clone()));
            }
            edge_set.insert((source, target));
        }
        let mut adjacency = vec![false; n * n];
        for &(s, t) in &edge_set {
            adjacency[s * n + t] = true;
        }
        let dag = ProgramDag {
            vertices,
            labels,
            edges: edge_set.into_iter().collect(),
            adjacency,
        };
        dag.check_acyclic()?;
        Ok(dag)
    }

    pub fn empty() -> Self {
        ProgramDag {
            vertices: Vec::new(),
            labels: Vec::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[DagVertex] {
        &self.vertices
    }

    pub fn vertex(&self, index: usize) -> &DagVertex {
        &self.vertices[index]
    }

    /// Source node ids (or generated `v{i}` labels).
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Sorted, deduplicated edge list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.adjacency[source * self.len() + target]
    }

    /// Kahn's algorithm, smallest index first among ready vertices.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indegree = vec![0usize; n];
        for &(_, t) in &self.edges {
            indegree[t] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for t in (0..n).filter(|&t| self.has_edge(v, t)) {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    ready.insert(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn check_acyclic(&self) -> Result<(), DagError> {
        match self.topological_order() {
            Some(_) => Ok(()),
            None => {
                // Report the smallest-index vertex left on a cycle.
                let mut indegree = vec![0usize; self.len()];
                for &(_, t) in &self.edges {
                    indegree[t] += 1;
                }
                let mut removed = vec![false; self.len()];
                let mut changed = true;
                while changed {
                    changed = false;
                    for v in 0..self.len() {
                        if !removed[v] && indegree[v] == 0 {
                            removed[v] = true;
                            changed = true;
                            for (t, degree) in indegree.iter_mut().enumerate() {
                                if self.has_edge(v, t) {
                                    *degree -= 1;
                                }
                            }
                        }
                    }
                }
                let culprit = removed.iter().position(|r| !r).unwrap_or(0);
                Err(DagError::CycleDetected(self.labels[culprit].clone()))
            }
        }
    }
}

/// Builds the DAG of a flow program: one vertex per node, one edge per
/// distinct (source, target) wire. Port indices are discarded.
pub fn build_dag(program: &FlowProgram) -> Result<ProgramDag, DagError> {
    let index: HashMap<&str, usize> = program
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id.as_str(), i))
        .collect();
    let vertices = program
        .nodes()
        .iter()
        .map(|n| DagVertex {
            node_type: n.node_type.clone(),
            attributes: n.attributes.clone(),
        })
        .collect();
    let labels = program.nodes().iter().map(|n| n.id.clone()).collect();
    let edges: Vec<(usize, usize)> = program
        .nodes()
        .iter()
        .enumerate()
        .flat_map(|(source, node)| {
            let index = &index;
            node.targets().map(move |t| (source, index[t]))
        })
        .collect();
    ProgramDag::with_labels(vertices, labels, edges)
}

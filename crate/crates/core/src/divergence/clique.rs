// SPDX-License-Identifier: Apache-2.0

//! Exact node-weighted maximum clique search.
//!
//! Weights are integers so that sums are exact. The search runs in two
//! phases, both branch-and-bound with a greedy-colouring upper bound:
//!
//! 1. vertices ordered by descending weighted degeneracy; finds the optimum
//!    weight and proves it.
//! 2. vertices in index order with the optimum as a target; the first clique
//!    reaching the target in include-first depth-first order is the
//!    lexicographically smallest optimal member set.
//!
//! Both phases share one search-node budget. If phase 1 runs out, the best
//! clique found so far is returned with `exact == false`.

/// Default number of search nodes before giving up on proving optimality.
pub const DEFAULT_CLIQUE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub(crate) fn full(len: usize) -> Self {
        let mut set = BitSet::new(len);
        for v in 0..len {
            set.insert(v);
        }
        set
    }

    pub(crate) fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub(crate) fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    pub(crate) fn contains(&self, v: usize) -> bool {
        self.words[v / 64] & (1 << (v % 64)) != 0
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub(crate) fn intersection(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn subtract(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }
}

/// Undirected graph with integer vertex weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    weights: Vec<u64>,
    adjacency: Vec<BitSet>,
}

impl WeightedGraph {
    pub fn new(weights: Vec<u64>) -> Self {
        let n = weights.len();
        WeightedGraph {
            weights,
            adjacency: vec![BitSet::new(n); n],
        }
    }

    /// Adds an undirected edge; self-loops are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adjacency[a].insert(b);
            self.adjacency[b].insert(a);
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].contains(b)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BitSet::count).sum::<usize>() / 2
    }

    pub fn is_clique(&self, members: &[usize]) -> bool {
        members.iter().enumerate().all(|(k, &a)| {
            members[k + 1..]
                .iter()
                .all(|&b| a != b && self.is_adjacent(a, b))
        })
    }
}

/// Outcome of a clique search. `members` is sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSolution {
    pub members: Vec<usize>,
    pub weight: u128,
    /// True when the weight is proven optimal within the budget.
    pub exact: bool,
    pub search_nodes: u64,
}

/// Finds a maximum-weight clique, preferring the lexicographically smallest
/// member set among optima.
pub fn solve(graph: &WeightedGraph, budget: u64) -> CliqueSolution {
    if graph.is_empty() {
        return CliqueSolution {
            members: Vec::new(),
            weight: 0,
            exact: true,
            search_nodes: 0,
        };
    }

    let order = degeneracy_order(graph);
    let mut first = Search::new(graph, order, budget, None);
    first.run();
    let mut members: Vec<usize> = first.best.iter().map(|&p| first.order[p]).collect();
    members.sort_unstable();
    let optimum = first.best_weight;
    let mut spent = first.nodes;
    if first.exhausted {
        return CliqueSolution {
            members,
            weight: optimum,
            exact: false,
            search_nodes: spent,
        };
    }

    let identity = (0..graph.len()).collect();
    let mut second = Search::new(graph, identity, budget.saturating_sub(spent), Some(optimum));
    second.run();
    spent += second.nodes;
    if second.found {
        members = second.best.clone();
    }
    CliqueSolution {
        members,
        weight: optimum,
        exact: true,
        search_nodes: spent,
    }
}

/// Repeatedly removes the vertex of smallest weighted degree (own weight plus
/// remaining neighbours' weights); the reverse removal order puts the densest,
/// heaviest core first.
fn degeneracy_order(graph: &WeightedGraph) -> Vec<usize> {
    let n = graph.len();
    let mut key: Vec<u128> = (0..n)
        .map(|v| {
            graph.weights[v] as u128
                + graph.adjacency[v]
                    .iter()
                    .map(|u| graph.weights[u] as u128)
                    .sum::<u128>()
        })
        .collect();
    let mut removed = vec![false; n];
    let mut removal = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (key[v], std::cmp::Reverse(v)))
            .expect("a vertex remains");
        removed[v] = true;
        removal.push(v);
        for u in graph.adjacency[v].iter() {
            if !removed[u] {
                key[u] -= graph.weights[v] as u128;
            }
        }
    }
    removal.reverse();
    removal
}

struct Search {
    order: Vec<usize>,
    weights: Vec<u64>,
    adjacency: Vec<BitSet>,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    target: Option<u128>,
    found: bool,
    best_weight: u128,
    best: Vec<usize>,
}

impl Search {
    /// Relabels the graph so that position `p` holds vertex `order[p]`.
    fn new(graph: &WeightedGraph, order: Vec<usize>, budget: u64, target: Option<u128>) -> Self {
        let n = graph.len();
        let mut position = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        let weights = order.iter().map(|&v| graph.weights[v]).collect();
        let adjacency = order
            .iter()
            .map(|&v| {
                let mut row = BitSet::new(n);
                for u in graph.adjacency[v].iter() {
                    row.insert(position[u]);
                }
                row
            })
            .collect();
        Search {
            order,
            weights,
            adjacency,
            budget,
            nodes: 0,
            exhausted: false,
            target,
            found: false,
            best_weight: 0,
            best: Vec::new(),
        }
    }

    fn run(&mut self) {
        let candidates = BitSet::full(self.weights.len());
        let mut clique = Vec::new();
        self.expand(&mut clique, 0, candidates);
    }

    fn expand(&mut self, clique: &mut Vec<usize>, weight: u128, mut candidates: BitSet) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        match self.target {
            Some(target) if weight == target => {
                self.best = clique.clone();
                self.best_weight = weight;
                self.found = true;
                return;
            }
            Some(_) => {}
            None => {
                if weight > self.best_weight {
                    self.best = clique.clone();
                    self.best_weight = weight;
                }
            }
        }
        while let Some(v) = candidates.first() {
            if self.is_hopeless(weight, &candidates) {
                break;
            }
            clique.push(v);
            let next = candidates.intersection(&self.adjacency[v]);
            self.expand(clique, weight + self.weights[v] as u128, next);
            clique.pop();
            if self.exhausted || self.found {
                return;
            }
            candidates.remove(v);
        }
    }

    /// True when no extension of the current clique by `candidates` can
    /// improve on the incumbent (or reach the target).
    fn is_hopeless(&self, weight: u128, candidates: &BitSet) -> bool {
        let limit = |bound: u128| match self.target {
            Some(target) => weight + bound < target,
            None => weight + bound <= self.best_weight,
        };
        let total: u128 = candidates.iter().map(|v| self.weights[v] as u128).sum();
        if limit(total) {
            return true;
        }
        limit(self.colour_bound(candidates))
    }

    /// Greedy colouring into independent sets; a clique holds at most one
    /// vertex per set, so the sum of per-set maxima bounds its weight.
    fn colour_bound(&self, candidates: &BitSet) -> u128 {
        let mut uncoloured = candidates.clone();
        let mut bound = 0u128;
        while !uncoloured.is_empty() {
            let mut available = uncoloured.clone();
            let mut heaviest = 0u64;
            while let Some(u) = available.first() {
                uncoloured.remove(u);
                available.remove(u);
                available.subtract(&self.adjacency[u]);
                heaviest = heaviest.max(self.weights[u]);
            }
            bound += heaviest as u128;
        }
        bound
    }
}

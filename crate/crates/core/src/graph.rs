//! First-order topology induced by a corpus, and adjacency-power statistics.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{NodeIndex, PathCorpus};
use crate::{Error, Result};

/// Directed first-order graph with multiplicity-weighted edge counts.
///
/// Nodes are the dense indices `0..node_count` of the corpus universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    node_count: usize,
    edges: BTreeMap<(NodeIndex, NodeIndex), u64>,
    successors: Vec<Vec<NodeIndex>>,
}

impl Graph {
    /// Builds a graph from explicit edge counts. Zero counts are dropped.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeIndex, NodeIndex, u64)>,
    {
        let mut map = BTreeMap::new();
        for (u, v, c) in edges {
            if u.index() >= node_count || v.index() >= node_count {
                return Err(Error::InvalidArgument(alloc::format!(
                    "edge ({u}, {v}) outside node range {node_count}"
                )));
            }
            if c > 0 {
                *map.entry((u, v)).or_insert(0) += c;
            }
        }
        let mut successors = vec![Vec::new(); node_count];
        for &(u, v) in map.keys() {
            successors[u.index()].push(v);
        }
        Ok(Self {
            node_count,
            edges: map,
            successors,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeIndex, NodeIndex, u64)> + '_ {
        self.edges.iter().map(|(&(u, v), &c)| (u, v, c))
    }

    pub fn edge_weight(&self, u: NodeIndex, v: NodeIndex) -> Option<u64> {
        self.edges.get(&(u, v)).copied()
    }

    /// Distinct successors of `u`, sorted by index.
    pub fn successors(&self, u: NodeIndex) -> &[NodeIndex] {
        &self.successors[u.index()]
    }
}

/// Walk statistics of the `order`-th power of the binarized adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdjPowerStats {
    pub order: usize,
    /// Sum of all entries of `A^order`: the number of walks of that length.
    pub path_count: u128,
    /// Rows of `A^order` with a positive sum.
    pub nonzero_rows: usize,
}

/// Edge `(u, v)` for every transition observed in the corpus.
pub fn first_order_graph(corpus: &PathCorpus) -> Graph {
    let mut edges: BTreeMap<(NodeIndex, NodeIndex), u64> = BTreeMap::new();
    for p in corpus.paths() {
        for w in p.nodes().windows(2) {
            *edges.entry((w[0], w[1])).or_insert(0) += p.multiplicity();
        }
    }
    Graph::from_edges(
        corpus.node_count(),
        edges.into_iter().map(|((u, v), c)| (u, v, c)),
    )
    .expect("corpus transitions stay inside the universe")
}

/// Walk statistics for every power `1..=max_order`.
///
/// Row sums of `A^i` are obtained as `A·(A^{i-1}·1)`, so only a vector of
/// per-node walk counts is kept. Arithmetic is checked; overflow of `u128`
/// is reported as [`Error::Overflow`].
pub fn adj_power_profile(graph: &Graph, max_order: usize) -> Result<Vec<AdjPowerStats>> {
    let n = graph.node_count();
    let mut walks: Vec<u128> = vec![1; n];
    let mut out = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        let mut next = vec![0u128; n];
        for (u, slot) in next.iter_mut().enumerate() {
            let mut acc = 0u128;
            for v in graph.successors(NodeIndex(u as u32)) {
                acc = acc
                    .checked_add(walks[v.index()])
                    .ok_or(Error::Overflow { order })?;
            }
            *slot = acc;
        }
        let mut total = 0u128;
        for &w in &next {
            total = total.checked_add(w).ok_or(Error::Overflow { order })?;
        }
        out.push(AdjPowerStats {
            order,
            path_count: total,
            nonzero_rows: next.iter().filter(|&&w| w > 0).count(),
        });
        walks = next;
    }
    Ok(out)
}

pub fn adj_power_stats(graph: &Graph, order: usize) -> Result<AdjPowerStats> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "matrix power must be at least 1".into(),
        ));
    }
    Ok(*adj_power_profile(graph, order)?
        .last()
        .expect("order >= 1 yields one entry"))
}

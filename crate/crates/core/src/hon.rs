//! Fixed-order higher-order networks and the stacked multi-order model.
//!
//! An order-`k` network has one node per distinct length-`k` subpath of the
//! corpus. Every observed window `(v1, …, vk, vk+1)` adds weight to the edge
//! `(v1, …, vk) → (v2, …, vk+1)`; edge probabilities are counts normalized
//! over the outgoing edges of the source state. Consequently the node set at
//! order `k + 1` is exactly the edge set at order `k`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::corpus::{NodeIndex, PathCorpus};
use crate::graph::{first_order_graph, Graph};
use crate::{Error, Result};

/// Edge between two states, identified by their positions in the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HonEdge {
    pub from: usize,
    pub to: usize,
    pub count: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HigherOrderNetwork {
    order: usize,
    /// Flattened states, `order` indices each, sorted lexicographically.
    states: Vec<NodeIndex>,
    node_count: usize,
    /// Sorted by `(from, to)`.
    edges: Vec<HonEdge>,
    out_offsets: Vec<usize>,
}

impl HigherOrderNetwork {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count == 0
    }

    pub fn state(&self, i: usize) -> &[NodeIndex] {
        &self.states[i * self.order..(i + 1) * self.order]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[NodeIndex]> + '_ {
        self.states.chunks_exact(self.order)
    }

    /// Last component of state `i`: the physical node the walker stands on.
    pub fn terminal(&self, i: usize) -> NodeIndex {
        self.states[(i + 1) * self.order - 1]
    }

    pub fn find_state(&self, state: &[NodeIndex]) -> Option<usize> {
        if state.len() != self.order {
            return None;
        }
        locate(&self.states, self.order, state)
    }

    pub fn edges(&self) -> &[HonEdge] {
        &self.edges
    }

    pub fn out_edges(&self, i: usize) -> &[HonEdge] {
        &self.edges[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_offsets[i + 1] - self.out_offsets[i]
    }

    /// Number of edges whose source suffix and target prefix disagree.
    pub fn overlap_violations(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| self.state(e.from)[1..] != self.state(e.to)[..self.order - 1])
            .count()
    }
}

/// Binary search over the sorted flat state table without materializing an
/// index vector.
fn locate(states: &[NodeIndex], order: usize, key: &[NodeIndex]) -> Option<usize> {
    let n = states.len() / order;
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match states[mid * order..(mid + 1) * order].cmp(key) {
            Ordering::Less => lo = mid + 1,
            Ordering::Greater => hi = mid,
            Ordering::Equal => return Some(mid),
        }
    }
    None
}

/// Sorts `(window, weight)` pairs and merges equal windows.
fn merge_windows(mut windows: Vec<(&[NodeIndex], u64)>) -> Vec<(&[NodeIndex], u64)> {
    windows.sort_unstable_by(|a, b| a.0.cmp(b.0));
    let mut merged: Vec<(&[NodeIndex], u64)> = Vec::with_capacity(windows.len());
    for (w, c) in windows {
        match merged.last_mut() {
            Some(last) if last.0 == w => last.1 += c,
            _ => merged.push((w, c)),
        }
    }
    merged
}

/// Builds the order-`k` network by sliding a window of `k + 1` nodes over
/// every path. Paths with fewer than `k` nodes contribute nothing; an empty
/// network is a valid result.
pub fn build_hon(corpus: &PathCorpus, k: usize) -> Result<HigherOrderNetwork> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "network order must be at least 1".into(),
        ));
    }
    let states_raw: Vec<(&[NodeIndex], u64)> = corpus
        .paths()
        .iter()
        .flat_map(|p| p.nodes().windows(k).map(|w| (w, 0)))
        .collect();
    let nodes = merge_windows(states_raw);
    let mut states = Vec::with_capacity(nodes.len() * k);
    for (w, _) in &nodes {
        states.extend_from_slice(w);
    }
    let node_count = nodes.len();

    let windows: Vec<(&[NodeIndex], u64)> = corpus
        .paths()
        .iter()
        .flat_map(|p| p.nodes().windows(k + 1).map(move |w| (w, p.multiplicity())))
        .collect();
    let windows = merge_windows(windows);

    let mut edges = Vec::with_capacity(windows.len());
    for (w, count) in windows {
        let from = locate(&states, k, &w[..k]).expect("window prefix is a state");
        let to = locate(&states, k, &w[1..]).expect("window suffix is a state");
        edges.push(HonEdge {
            from,
            to,
            count,
            probability: 0.0,
        });
    }
    // Windows sorted lexicographically give edges sorted by (from, to).
    let mut out_offsets = alloc::vec![0usize; node_count + 1];
    for e in &edges {
        out_offsets[e.from + 1] += 1;
    }
    for i in 0..node_count {
        out_offsets[i + 1] += out_offsets[i];
    }
    for i in 0..node_count {
        let out = &mut edges[out_offsets[i]..out_offsets[i + 1]];
        let total: u64 = out.iter().map(|e| e.count).sum();
        for e in out {
            e.probability = e.count as f64 / total as f64;
        }
    }
    Ok(HigherOrderNetwork {
        order: k,
        states,
        node_count,
        edges,
        out_offsets,
    })
}

/// Layers of orders `1..=max_order` built from one corpus, together with the
/// empirical start-node distribution (the implicit order-0 layer).
#[derive(Debug, Clone)]
pub struct MultiOrderModel {
    max_order: usize,
    layers: Vec<HigherOrderNetwork>,
    start_counts: Vec<u64>,
    start_distribution: Vec<f64>,
    topology: Graph,
    tokens: Vec<String>,
    lookup: BTreeMap<String, NodeIndex>,
    token_ranks: Vec<u32>,
}

pub fn build_multi_order(corpus: &PathCorpus, max_order: usize) -> Result<MultiOrderModel> {
    if max_order == 0 {
        return Err(Error::InvalidArgument(
            "maximum order must be at least 1".into(),
        ));
    }
    let layers = (1..=max_order)
        .map(|k| build_hon(corpus, k))
        .collect::<Result<Vec<_>>>()?;
    let mut start_counts = alloc::vec![0u64; corpus.node_count()];
    for p in corpus.paths() {
        start_counts[p.nodes()[0].index()] += p.multiplicity();
    }
    let total = corpus.instance_count() as f64;
    let start_distribution = start_counts.iter().map(|&c| c as f64 / total).collect();
    let tokens = corpus.tokens().to_vec();
    let lookup = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), NodeIndex(i as u32)))
        .collect();
    Ok(MultiOrderModel {
        max_order,
        layers,
        start_counts,
        start_distribution,
        topology: first_order_graph(corpus),
        tokens,
        lookup,
        token_ranks: corpus.token_ranks(),
    })
}

impl MultiOrderModel {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Layer of order `k`, `1 <= k <= max_order`.
    pub fn layer(&self, k: usize) -> Option<&HigherOrderNetwork> {
        k.checked_sub(1).and_then(|i| self.layers.get(i))
    }

    pub fn layers(&self) -> &[HigherOrderNetwork] {
        &self.layers
    }

    pub fn topology(&self) -> &Graph {
        &self.topology
    }

    pub fn node_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn start_probability(&self, node: NodeIndex) -> f64 {
        self.start_distribution
            .get(node.index())
            .copied()
            .unwrap_or(0.0)
    }

    pub fn start_distribution(&self) -> &[f64] {
        &self.start_distribution
    }

    pub fn start_count(&self, node: NodeIndex) -> u64 {
        self.start_counts.get(node.index()).copied().unwrap_or(0)
    }

    pub fn token(&self, node: NodeIndex) -> &str {
        &self.tokens[node.index()]
    }

    pub fn index_of(&self, token: &str) -> Option<NodeIndex> {
        self.lookup.get(token).copied()
    }

    pub(crate) fn token_rank(&self, node: NodeIndex) -> u32 {
        self.token_ranks[node.index()]
    }

    /// Maps every node index of `corpus` onto this model's index space.
    pub fn align(&self, corpus: &PathCorpus) -> Vec<Option<NodeIndex>> {
        if corpus.tokens() == self.tokens.as_slice() {
            return (0..self.tokens.len() as u32)
                .map(|i| Some(NodeIndex(i)))
                .collect();
        }
        corpus.tokens().iter().map(|t| self.index_of(t)).collect()
    }

    /// Observed continuations of `context` in the layer of its own length.
    pub fn continuations(&self, context: &[NodeIndex]) -> Option<&[HonEdge]> {
        let layer = self.layer(context.len())?;
        let i = locate(&layer.states, layer.order, context)?;
        let out = layer.out_edges(i);
        (!out.is_empty()).then_some(out)
    }

    /// `P(next | history)` using the last `min(k, history.len())` nodes as
    /// context. Unobserved contexts or continuations give 0.
    pub fn transition_prob(&self, history: &[NodeIndex], next: NodeIndex, k: usize) -> Result<f64> {
        if history.is_empty() {
            return Err(Error::InvalidArgument("history must not be empty".into()));
        }
        if k == 0 || k > self.max_order {
            return Err(Error::InvalidArgument(alloc::format!(
                "order {k} outside 1..={}",
                self.max_order
            )));
        }
        let c = k.min(history.len());
        let context = &history[history.len() - c..];
        Ok(self.edge_probability(context, next))
    }

    pub(crate) fn edge_probability(&self, context: &[NodeIndex], next: NodeIndex) -> f64 {
        let Some(out) = self.continuations(context) else {
            return 0.0;
        };
        let layer = &self.layers[context.len() - 1];
        out.iter()
            .find(|e| layer.terminal(e.to) == next)
            .map_or(0.0, |e| e.probability)
    }

    /// Token-level convenience wrapper around [`Self::transition_prob`].
    pub fn transition_prob_tokens(&self, history: &[&str], next: &str, k: usize) -> Result<f64> {
        let Some(next) = self.index_of(next) else {
            return Ok(0.0);
        };
        // Only the context window matters; an unknown token inside it makes
        // the context unobserved.
        let c = k.min(history.len());
        let mut ctx = Vec::with_capacity(c);
        for t in &history[history.len().saturating_sub(c)..] {
            match self.index_of(t) {
                Some(i) => ctx.push(i),
                None => return Ok(0.0),
            }
        }
        if ctx.is_empty() {
            return Err(Error::InvalidArgument("history must not be empty".into()));
        }
        self.transition_prob(&ctx, next, k)
    }
}

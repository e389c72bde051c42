//! Seeded synthetic path sources with a planted memory order.
//!
//! The topology is a random regular digraph: every node has `branching`
//! successors and `branching` predecessors. A context is any walk of
//! `order` nodes. Its preferred continuation is a random base for the last
//! node, shifted by one for every step `u → v` of the context where `u` is
//! the first predecessor of `v`. Each extra node of history can move the
//! preference, so every context length up to `order` carries information
//! that shorter ones lack, and nothing beyond `order` does.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CorpusBuilder, NodeIndex, PathCorpus};
use crate::{Error, Result};

/// Upper bound on the number of enumerated contexts.
const MAX_CONTEXTS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedChain {
    order: usize,
    node_count: usize,
    seed: u64,
    successors: Vec<Vec<NodeIndex>>,
    /// Flattened contexts, `order` nodes each, sorted lexicographically.
    contexts: Vec<NodeIndex>,
    /// Continuation distribution per context, aligned with `successors`
    /// of the context's last node.
    table: Vec<Vec<f64>>,
}

impl PlantedChain {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn context_count(&self) -> usize {
        self.table.len()
    }

    pub fn context(&self, i: usize) -> &[NodeIndex] {
        &self.contexts[i * self.order..(i + 1) * self.order]
    }

    pub fn successors(&self, node: NodeIndex) -> &[NodeIndex] {
        &self.successors[node.index()]
    }

    fn locate(&self, context: &[NodeIndex]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.table.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.context(mid).cmp(context) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// `(next, probability)` pairs for a context, or `None` if the context
    /// is not a walk of the topology.
    pub fn distribution(&self, context: &[NodeIndex]) -> Option<Vec<(NodeIndex, f64)>> {
        let i = self.locate(context)?;
        let last = context[self.order - 1];
        Some(
            self.successors(last)
                .iter()
                .copied()
                .zip(self.table[i].iter().copied())
                .collect(),
        )
    }

    pub fn token(node: NodeIndex) -> String {
        format!("n{}", node.0)
    }
}

/// Builds a planted chain of memory `order` over `node_count` nodes.
///
/// The preferred continuation of every context receives probability
/// `determinism`; the remaining mass is shared evenly by the other
/// `branching − 1` successors.
pub fn random_planted_chain(
    node_count: usize,
    order: usize,
    branching: usize,
    determinism: f64,
    seed: u64,
) -> Result<PlantedChain> {
    if branching < 2 || node_count < branching {
        return Err(Error::Infeasible(format!(
            "need node_count >= branching >= 2 (got {node_count} nodes, branching {branching})"
        )));
    }
    if order == 0 {
        return Err(Error::Infeasible("order must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&determinism) {
        return Err(Error::Infeasible(format!(
            "determinism {determinism} outside [0, 1]"
        )));
    }
    if order >= 2 && determinism <= 1.0 / branching as f64 {
        return Err(Error::Infeasible(format!(
            "determinism {determinism} does not single out a continuation among {branching}"
        )));
    }
    if node_count > u32::MAX as usize {
        return Err(Error::Infeasible("too many nodes".into()));
    }
    let contexts_needed = (order - 1) as u32;
    let total = (branching as u128)
        .checked_pow(contexts_needed)
        .and_then(|p| p.checked_mul(node_count as u128))
        .filter(|&t| t <= MAX_CONTEXTS as u128)
        .ok_or_else(|| Error::Infeasible("too many contexts to enumerate".into()))?
        as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Circulant digraph under a random relabeling; self-loops only when the
    // node count leaves no other choice.
    let (pool, shift) = if node_count > branching {
        (node_count - 1, 1)
    } else {
        (node_count, 0)
    };
    let mut offsets: Vec<usize> = index::sample(&mut rng, pool, branching)
        .into_iter()
        .map(|o| o + shift)
        .collect();
    offsets.sort_unstable();
    let mut relabel: Vec<u32> = (0..node_count as u32).collect();
    relabel.shuffle(&mut rng);
    let mut successors = vec![Vec::new(); node_count];
    for v in 0..node_count {
        let mut succ: Vec<NodeIndex> = offsets
            .iter()
            .map(|o| NodeIndex(relabel[(v + o) % node_count]))
            .collect();
        succ.sort_unstable();
        successors[relabel[v] as usize] = succ;
    }
    let mut predecessors = vec![Vec::new(); node_count];
    for (u, succ) in successors.iter().enumerate() {
        for v in succ {
            predecessors[v.index()].push(NodeIndex(u as u32));
        }
    }
    for p in &mut predecessors {
        p.sort_unstable();
    }

    // Enumerate every walk of `order` nodes, lexicographically.
    let mut contexts: Vec<NodeIndex> = Vec::with_capacity(total * order);
    let mut stack: Vec<NodeIndex> = Vec::with_capacity(order);
    fn extend(
        successors: &[Vec<NodeIndex>],
        order: usize,
        stack: &mut Vec<NodeIndex>,
        out: &mut Vec<NodeIndex>,
    ) {
        if stack.len() == order {
            out.extend_from_slice(stack);
            return;
        }
        let last = *stack.last().expect("stack seeded with a start node");
        for &next in &successors[last.index()] {
            stack.push(next);
            extend(successors, order, stack, out);
            stack.pop();
        }
    }
    for v in 0..node_count {
        stack.clear();
        stack.push(NodeIndex(v as u32));
        extend(&successors, order, &mut stack, &mut contexts);
    }
    let count = contexts.len() / order;

    let base: Vec<usize> = (0..node_count)
        .map(|_| rng.random_range(0..branching))
        .collect();
    let spread = (1.0 - determinism) / (branching - 1) as f64;
    let mut table = Vec::with_capacity(count);
    for i in 0..count {
        let ctx = &contexts[i * order..(i + 1) * order];
        let shifts = ctx
            .windows(2)
            .filter(|w| predecessors[w[1].index()][0] == w[0])
            .count();
        let preferred = (base[ctx[order - 1].index()] + shifts) % branching;
        let mut row = vec![spread; branching];
        row[preferred] = determinism;
        table.push(row);
    }

    Ok(PlantedChain {
        order,
        node_count,
        seed,
        successors,
        contexts,
        table,
    })
}

fn sample(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left `u` past the last bucket; take the last positive one.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Samples `n_paths` paths with lengths uniform in `min_len..=max_len`.
/// Each path starts from a uniformly chosen context and then follows the
/// planted transition table.
pub fn generate_corpus(
    chain: &PlantedChain,
    n_paths: usize,
    min_len: usize,
    max_len: usize,
    seed: u64,
) -> Result<PathCorpus> {
    if n_paths == 0 {
        return Err(Error::InvalidArgument("need at least one path".into()));
    }
    if min_len < chain.order || min_len > max_len {
        return Err(Error::InvalidArgument(format!(
            "need order <= min_len <= max_len (order {}, lengths {min_len}..={max_len})",
            chain.order
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = CorpusBuilder::new();
    let mut path: Vec<NodeIndex> = Vec::with_capacity(max_len);
    for _ in 0..n_paths {
        let len = rng.random_range(min_len..=max_len);
        let mut ctx = rng.random_range(0..chain.context_count());
        path.clear();
        path.extend_from_slice(chain.context(ctx));
        while path.len() < len {
            let last = path[path.len() - 1];
            let next = chain.successors(last)[sample(&mut rng, &chain.table[ctx])];
            path.push(next);
            ctx = chain
                .locate(&path[path.len() - chain.order..])
                .expect("walks stay inside the context set");
        }
        builder.push(path.iter().map(|&n| PlantedChain::token(n)), 1)?;
    }
    builder.finish()
}

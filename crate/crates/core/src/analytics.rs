//! Structural metrics and degree distributions of higher-order layers.
//!
//! Distances are unweighted directed hop counts. Diameter and average
//! shortest path are taken over ordered pairs `(u, v)`, `u != v`, with `v`
//! reachable from `u`, both inside the largest weakly connected component.
//! Unreachable pairs are skipped rather than counted as infinite.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::PathCorpus;
use crate::hon::{build_hon, HigherOrderNetwork};
use crate::{Error, Result};

/// One row of the per-order structural summary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StructuralReport {
    pub order: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub mean_in_degree: f64,
    pub mean_out_degree: f64,
    pub diameter: u32,
    pub avg_shortest_path: f64,
    pub density: f64,
    pub gcc_ratio: f64,
    /// Diameter and average shortest path come from sampled BFS sources.
    pub estimated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    /// Largest component size for which all sources are searched.
    pub exact_threshold: usize,
    /// Number of BFS sources when the component exceeds the threshold.
    pub sample_sources: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            exact_threshold: 20_000,
            sample_sources: 1_000,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DegreeDirection {
    In,
    Out,
    Total,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DegreeDistribution {
    pub direction: DegreeDirection,
    pub pmf: BTreeMap<usize, f64>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Members of the largest weakly connected component, sorted. Ties go to
/// the component containing the smallest state index.
pub fn giant_weak_component(hon: &HigherOrderNetwork) -> Vec<usize> {
    let n = hon.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for e in hon.edges() {
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
    }
    let mut size = vec![0usize; n];
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    for &r in &roots {
        size[r] += 1;
    }
    // Roots are the minimum index of their component, so a strict `>` keeps
    // the lowest-indexed component among equals.
    let mut best = None;
    for r in 0..n {
        if roots[r] == r && best.is_none_or(|b: usize| size[r] > size[b]) {
            best = Some(r);
        }
    }
    match best {
        Some(b) => (0..n).filter(|&i| roots[i] == b).collect(),
        None => Vec::new(),
    }
}

/// Breadth-first distances from `source`; calls `visit(dist)` for every
/// reached node other than the source.
fn bfs(
    hon: &HigherOrderNetwork,
    source: usize,
    dist: &mut [u32],
    queue: &mut VecDeque<usize>,
    mut visit: impl FnMut(u32),
) {
    const UNSEEN: u32 = u32::MAX;
    dist.fill(UNSEEN);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let d = dist[u] + 1;
        for e in hon.out_edges(u) {
            if dist[e.to] == UNSEEN {
                dist[e.to] = d;
                visit(d);
                queue.push_back(e.to);
            }
        }
    }
}

pub fn structural_report(hon: &HigherOrderNetwork, opts: &ReportOptions) -> StructuralReport {
    let n = hon.node_count();
    let m = hon.edge_count();
    let mean_degree = if n == 0 { 0.0 } else { m as f64 / n as f64 };
    let density = if n < 2 {
        0.0
    } else {
        m as f64 / (n as f64 * (n as f64 - 1.0))
    };
    let gcc = giant_weak_component(hon);
    let gcc_ratio = if n == 0 {
        0.0
    } else {
        gcc.len() as f64 / n as f64
    };

    let estimated = gcc.len() > opts.exact_threshold;
    let sources: Vec<usize> = if estimated {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut picked: Vec<usize> =
            index::sample(&mut rng, gcc.len(), opts.sample_sources.min(gcc.len()))
                .into_iter()
                .map(|i| gcc[i])
                .collect();
        picked.sort_unstable();
        picked
    } else {
        gcc
    };

    let mut dist = vec![0u32; n];
    let mut queue = VecDeque::new();
    let mut diameter = 0u32;
    let mut pairs = 0u64;
    let mut total = 0u64;
    for &s in &sources {
        bfs(hon, s, &mut dist, &mut queue, |d| {
            diameter = diameter.max(d);
            pairs += 1;
            total += u64::from(d);
        });
    }
    let avg_shortest_path = if pairs == 0 {
        0.0
    } else {
        total as f64 / pairs as f64
    };

    StructuralReport {
        order: hon.order(),
        node_count: n,
        edge_count: m,
        mean_in_degree: mean_degree,
        mean_out_degree: mean_degree,
        diameter,
        avg_shortest_path,
        density,
        gcc_ratio,
        estimated,
    }
}

/// Per-node degrees in the requested direction, indexed by state.
pub fn degrees(hon: &HigherOrderNetwork, direction: DegreeDirection) -> Vec<usize> {
    let mut deg = vec![0usize; hon.node_count()];
    for e in hon.edges() {
        if direction != DegreeDirection::In {
            deg[e.from] += 1;
        }
        if direction != DegreeDirection::Out {
            deg[e.to] += 1;
        }
    }
    deg
}

/// Fraction of nodes with each degree; isolated nodes count at degree 0.
pub fn degree_distribution(
    hon: &HigherOrderNetwork,
    direction: DegreeDirection,
) -> Result<DegreeDistribution> {
    if hon.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for d in degrees(hon, direction) {
        *counts.entry(d).or_insert(0) += 1;
    }
    let n = hon.node_count() as f64;
    Ok(DegreeDistribution {
        direction,
        pmf: counts.into_iter().map(|(d, c)| (d, c as f64 / n)).collect(),
    })
}

/// Reports for orders `1..=max_k`, each layer built from `corpus`.
pub fn multi_order_reports(
    corpus: &PathCorpus,
    max_k: usize,
    opts: &ReportOptions,
) -> Result<Vec<StructuralReport>> {
    if max_k == 0 {
        return Err(Error::InvalidArgument(
            "maximum order must be at least 1".into(),
        ));
    }
    (1..=max_k)
        .map(|k| build_hon(corpus, k).map(|h| structural_report(&h, opts)))
        .collect()
}

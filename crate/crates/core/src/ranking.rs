//! Higher-order PageRank, aggregation onto physical nodes, and Kendall's
//! tau-b rank agreement.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::corpus::{NodeIndex, PathCorpus};
use crate::hon::{build_hon, HigherOrderNetwork};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PageRankOptions {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-12,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankResult {
    /// Stationary mass per higher-order state, indexed like the network.
    pub scores: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Power iteration on the edge-probability transition matrix with uniform
/// teleportation over states. Dangling states spread their mass uniformly.
/// Stops once the L1 change drops below `tol`.
pub fn hon_pagerank(hon: &HigherOrderNetwork, opts: &PageRankOptions) -> Result<PageRankResult> {
    hon_pagerank_from(hon, opts, None)
}

/// Same as [`hon_pagerank`] but starting from `start` (normalized
/// internally) instead of the uniform vector.
pub fn hon_pagerank_from(
    hon: &HigherOrderNetwork,
    opts: &PageRankOptions,
    start: Option<&[f64]>,
) -> Result<PageRankResult> {
    let n = hon.node_count();
    if n == 0 {
        return Err(Error::EmptyNetwork);
    }
    if !(opts.damping > 0.0 && opts.damping < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "damping {} outside (0, 1)",
            opts.damping
        )));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let inv_n = 1.0 / n as f64;
    let dangling: Vec<usize> = (0..n).filter(|&i| hon.out_degree(i) == 0).collect();
    let mut x = match start {
        None => vec![inv_n; n],
        Some(s) => {
            let total: f64 = s.iter().sum();
            if s.len() != n
                || s.iter().any(|&v| v.is_nan() || v < 0.0)
                || total.is_nan()
                || total <= 0.0
            {
                return Err(Error::InvalidArgument(
                    "start vector must be non-negative with positive mass".into(),
                ));
            }
            s.iter().map(|v| v / total).collect()
        }
    };
    let mut next = vec![0.0; n];
    for iter in 1..=opts.max_iter {
        let dangling_mass: f64 = dangling.iter().map(|&i| x[i]).sum();
        let base = (1.0 - opts.damping) * inv_n + opts.damping * dangling_mass * inv_n;
        next.fill(base);
        for e in hon.edges() {
            next[e.to] += opts.damping * x[e.from] * e.probability;
        }
        let total: f64 = next.iter().sum();
        let mut delta = 0.0;
        for (a, b) in next.iter_mut().zip(&x) {
            *a /= total;
            delta += (*a - b).abs();
        }
        core::mem::swap(&mut x, &mut next);
        if delta < opts.tol {
            return Ok(PageRankResult {
                scores: x,
                converged: true,
                iterations: iter,
            });
        }
    }
    Ok(PageRankResult {
        scores: x,
        converged: false,
        iterations: opts.max_iter,
    })
}

/// Sums state scores onto the last node of each state.
pub fn aggregate_pagerank(hon: &HigherOrderNetwork, scores: &[f64]) -> BTreeMap<NodeIndex, f64> {
    let mut out = BTreeMap::new();
    for (i, &s) in scores.iter().enumerate().take(hon.node_count()) {
        *out.entry(hon.terminal(i)).or_insert(0.0) += s;
    }
    out
}

/// Number of strictly inverted pairs, counted while merge-sorting `v`.
fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = count_inversions(&mut v[..mid], &mut buf[..mid])
        + count_inversions(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j].total_cmp(&v[i]) == Ordering::Less {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// `Σ t(t−1)/2` over runs of equal values in a sorted sequence.
fn tied_pairs<T, F: Fn(&T, &T) -> bool>(sorted: &[T], eq: F) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if eq(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Kendall's tau-b over the keys present in both maps, in `O(n log n)`.
///
/// Returns 0 when either side is entirely tied (the coefficient is
/// undefined there).
pub fn kendall_tau<K: Ord>(x: &BTreeMap<K, f64>, y: &BTreeMap<K, f64>) -> Result<f64> {
    let mut pairs: Vec<(f64, f64)> = x
        .iter()
        .filter_map(|(k, &a)| y.get(k).map(|&b| (a + 0.0, b + 0.0))) // folds -0.0 into 0.0
        .collect();
    if pairs.len() < 2 {
        return Err(Error::InvalidArgument(
            "kendall tau needs at least two shared keys".into(),
        ));
    }
    if pairs.iter().any(|(a, b)| a.is_nan() || b.is_nan()) {
        return Err(Error::InvalidArgument(
            "kendall tau input contains NaN".into(),
        ));
    }
    let n = pairs.len() as u64;
    let all = n * (n - 1) / 2;
    pairs.sort_unstable_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let x_ties = tied_pairs(&pairs, |p, q| p.0 == q.0);
    let joint_ties = tied_pairs(&pairs, |p, q| p.0 == q.0 && p.1 == q.1);
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; ys.len()];
    let discordant = count_inversions(&mut ys, &mut buf);
    let y_ties = tied_pairs(&ys, |a, b| a == b);

    let concordant_minus_discordant =
        all as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * discordant as f64;
    let denom = libm::sqrt((all - x_ties) as f64 * (all - y_ties) as f64);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((concordant_minus_discordant / denom).clamp(-1.0, 1.0))
}

/// Rank agreement between aggregated PageRank and visit counts at one order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AlignmentPoint {
    pub order: usize,
    /// `None` when the layer is empty or covers fewer than two nodes.
    pub tau: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub node_scores: BTreeMap<NodeIndex, f64>,
}

/// Kendall's tau between aggregated order-`k` PageRank and multiplicity-
/// weighted visit counts, for `k = 1..=max_k`.
pub fn pagerank_alignment(
    corpus: &PathCorpus,
    max_k: usize,
    opts: &PageRankOptions,
) -> Result<Vec<AlignmentPoint>> {
    if max_k == 0 {
        return Err(Error::InvalidArgument(
            "maximum order must be at least 1".into(),
        ));
    }
    let visits: BTreeMap<NodeIndex, f64> = corpus
        .visit_counts()
        .into_iter()
        .enumerate()
        .map(|(i, c)| (NodeIndex(i as u32), c as f64))
        .collect();
    let mut out = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        let hon = build_hon(corpus, k)?;
        if hon.is_empty() {
            out.push(AlignmentPoint {
                order: k,
                tau: None,
                converged: true,
                iterations: 0,
                node_scores: BTreeMap::new(),
            });
            continue;
        }
        let pr = hon_pagerank(&hon, opts)?;
        let agg = aggregate_pagerank(&hon, &pr.scores);
        let tau = if agg.len() >= 2 {
            Some(kendall_tau(&agg, &visits)?)
        } else {
            None
        };
        out.push(AlignmentPoint {
            order: k,
            tau,
            converged: pr.converged,
            iterations: pr.iterations,
            node_scores: agg,
        });
    }
    Ok(out)
}

//! Path likelihoods, likelihood-ratio tests and optimal-order selection.

use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{NodeIndex, Path, PathCorpus};
use crate::graph::{adj_power_profile, Graph};
use crate::hon::MultiOrderModel;
use crate::special::chi2_survival;
use crate::{Error, Result};

/// Window within which a negative Λ is treated as rounding noise.
pub const LAMBDA_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LrtResult {
    pub null_order: usize,
    pub alt_order: usize,
    pub log_likelihood_null: f64,
    pub log_likelihood_alt: f64,
    pub lambda: f64,
    pub delta_d: u128,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OrderSelection {
    pub optimal_order: usize,
    pub epsilon: f64,
    pub trace: Vec<LrtResult>,
    /// Every test up to the maximum order was significant, so the search
    /// stopped at the cap rather than at a non-significant test.
    pub truncated: bool,
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct Sum {
    total: f64,
    comp: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.total + x;
        if self.total.abs() >= x.abs() {
            self.comp += (self.total - t) + x;
        } else {
            self.comp += (x - t) + self.total;
        }
        self.total = t;
    }

    fn value(self) -> f64 {
        self.total + self.comp
    }
}

fn check_order(model: &MultiOrderModel, k: usize) -> Result<()> {
    if k == 0 || k > model.max_order() {
        return Err(Error::InvalidArgument(alloc::format!(
            "order {k} outside 1..={}",
            model.max_order()
        )));
    }
    Ok(())
}

fn describe(corpus: &PathCorpus, path: &Path) -> String {
    let mut s = String::new();
    for (i, t) in corpus.path_tokens(path).enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(t);
    }
    s
}

/// Per-path conditional log-probabilities, `out[t]` for the transition into
/// position `t` (`t >= 1`) under order `k`. Returns `None` on a zero factor.
fn step_log_probs(
    model: &MultiOrderModel,
    nodes: &[NodeIndex],
    k: usize,
    out: &mut Vec<f64>,
) -> Option<()> {
    out.clear();
    for t in 1..nodes.len() {
        let c = k.min(t);
        let p = model.edge_probability(&nodes[t - c..t], nodes[t]);
        if p <= 0.0 {
            return None;
        }
        out.push(libm::log(p));
    }
    Some(())
}

fn aligned_nodes(map: &[Option<NodeIndex>], path: &Path) -> Option<Vec<NodeIndex>> {
    path.nodes().iter().map(|n| map[n.index()]).collect()
}

/// Log-likelihood of the corpus under the multi-order model truncated at
/// order `k`: each step conditions on `min(k, available history)` nodes and
/// the first node is drawn from the start distribution.
pub fn log_likelihood(model: &MultiOrderModel, corpus: &PathCorpus, k: usize) -> Result<f64> {
    check_order(model, k)?;
    let map = model.align(corpus);
    let mut total = Sum::default();
    let mut steps = Vec::new();
    for path in corpus.paths() {
        let zero = || Error::ZeroProbabilityPath {
            path: describe(corpus, path),
            order: k,
        };
        let nodes = aligned_nodes(&map, path).ok_or_else(zero)?;
        let start = model.start_probability(nodes[0]);
        if start <= 0.0 {
            return Err(zero());
        }
        step_log_probs(model, &nodes, k, &mut steps).ok_or_else(zero)?;
        let m = path.multiplicity() as f64;
        total.add(m * libm::log(start));
        for &s in &steps {
            total.add(m * s);
        }
    }
    Ok(total.value())
}

/// `Λ / 2` computed as the sum of per-step log-ratio differences, which
/// avoids cancellation between two large log-likelihoods.
fn half_lambda(model: &MultiOrderModel, corpus: &PathCorpus, k: usize) -> Result<f64> {
    let map = model.align(corpus);
    let mut total = Sum::default();
    let (mut null, mut alt) = (Vec::new(), Vec::new());
    for path in corpus.paths() {
        let zero = |order| Error::ZeroProbabilityPath {
            path: describe(corpus, path),
            order,
        };
        let nodes = aligned_nodes(&map, path).ok_or_else(|| zero(k))?;
        step_log_probs(model, &nodes, k, &mut null).ok_or_else(|| zero(k))?;
        step_log_probs(model, &nodes, k + 1, &mut alt).ok_or_else(|| zero(k + 1))?;
        let m = path.multiplicity() as f64;
        // Steps before position k + 1 use identical contexts in both models.
        for (a, n) in alt.iter().zip(&null).skip(k) {
            total.add(m * (a - n));
        }
    }
    Ok(total.value())
}

/// Parameter counts `d(0..=max_order)` of the topology:
/// `d(k) = (|V| − 1) + Σ_{i=1..k} [walks_i − nonzero_rows_i]` where both
/// terms come from powers of the binarized adjacency matrix.
pub fn degrees_of_freedom_profile(topology: &Graph, max_order: usize) -> Result<Vec<u128>> {
    if topology.node_count() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let mut d = (topology.node_count() - 1) as u128;
    let mut out = Vec::with_capacity(max_order + 1);
    out.push(d);
    for s in adj_power_profile(topology, max_order)? {
        let extra = s
            .path_count
            .checked_sub(s.nonzero_rows as u128)
            .ok_or_else(|| Error::Inconsistent("fewer walks than non-zero rows".into()))?;
        d = d
            .checked_add(extra)
            .ok_or(Error::Overflow { order: s.order })?;
        out.push(d);
    }
    Ok(out)
}

pub fn degrees_of_freedom(topology: &Graph, k: usize) -> Result<u128> {
    Ok(*degrees_of_freedom_profile(topology, k)?
        .last()
        .expect("profile holds d(0..=k)"))
}

/// χ² upper-tail p-value for statistic `lambda` with `delta_d` degrees of
/// freedom. With zero degrees of freedom the null distribution is a point
/// mass at 0.
pub fn p_value(lambda: f64, delta_d: u128) -> Result<f64> {
    if delta_d == 0 {
        return Ok(if lambda <= 0.0 { 1.0 } else { 0.0 });
    }
    chi2_survival(delta_d as f64, lambda.max(0.0))
}

fn clamp_lambda(raw: f64) -> Result<f64> {
    if raw >= 0.0 {
        Ok(raw)
    } else if raw >= -LAMBDA_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::Inconsistent(alloc::format!(
            "likelihood decreased with order (lambda = {raw})"
        )))
    }
}

/// Likelihood-ratio test of order `k` (null) against `k + 1`.
pub fn lrt(model: &MultiOrderModel, corpus: &PathCorpus, k: usize) -> Result<LrtResult> {
    check_order(model, k)?;
    check_order(model, k + 1)?;
    let dof = degrees_of_freedom_profile(model.topology(), k + 1)?;
    lrt_with_dof(model, corpus, k, &dof)
}

fn lrt_with_dof(
    model: &MultiOrderModel,
    corpus: &PathCorpus,
    k: usize,
    dof: &[u128],
) -> Result<LrtResult> {
    let delta_d = dof[k + 1]
        .checked_sub(dof[k])
        .ok_or_else(|| Error::Inconsistent("negative degrees-of-freedom difference".into()))?;
    let lambda = clamp_lambda(2.0 * half_lambda(model, corpus, k)?)?;
    Ok(LrtResult {
        null_order: k,
        alt_order: k + 1,
        log_likelihood_null: log_likelihood(model, corpus, k)?,
        log_likelihood_alt: log_likelihood(model, corpus, k + 1)?,
        lambda,
        delta_d,
        p_value: p_value(lambda, delta_d)?,
    })
}

/// Greedy forward search: test `k` against `k + 1` for `k = 1, 2, …` and stop
/// at the first test with `p >= epsilon`.
pub fn optimal_order(
    model: &MultiOrderModel,
    corpus: &PathCorpus,
    epsilon: f64,
    max_k: usize,
) -> Result<OrderSelection> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "significance level {epsilon} outside (0, 1)"
        )));
    }
    check_order(model, max_k)?;
    let dof = degrees_of_freedom_profile(model.topology(), max_k)?;
    let mut trace = Vec::new();
    for k in 1..max_k {
        let r = lrt_with_dof(model, corpus, k, &dof)?;
        let significant = r.p_value < epsilon;
        trace.push(r);
        if !significant {
            return Ok(OrderSelection {
                optimal_order: k,
                epsilon,
                trace,
                truncated: false,
            });
        }
    }
    Ok(OrderSelection {
        optimal_order: max_k,
        epsilon,
        trace,
        truncated: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PathCorpus;
    use crate::graph::Graph;
    use crate::hon::build_multi_order;
    use proptest::prelude::*;

    fn corpus(paths: &[(&[&str], u64)]) -> PathCorpus {
        PathCorpus::from_token_paths(paths.iter().map(|(p, m)| (p.iter().copied(), *m))).unwrap()
    }

    fn arcs(node_count: usize, arcs: &[(u32, u32)]) -> Graph {
        Graph::from_edges(
            node_count,
            arcs.iter().map(|&(u, v)| (NodeIndex(u), NodeIndex(v), 1)),
        )
        .unwrap()
    }

    #[test]
    fn likelihood_examples() {
        let c = corpus(&[(&["a", "b", "c"], 1)]);
        let m = build_multi_order(&c, 2).unwrap();
        assert_eq!(log_likelihood(&m, &c, 1).unwrap(), 0.0);

        let c = corpus(&[(&["a", "b", "c"], 1), (&["a", "b", "d"], 1)]);
        let m = build_multi_order(&c, 2).unwrap();
        let expected = 2.0 * 0.5f64.ln();
        assert!((log_likelihood(&m, &c, 1).unwrap() - expected).abs() < 1e-12);
        assert!((log_likelihood(&m, &c, 2).unwrap() - expected).abs() < 1e-12);
        assert!(log_likelihood(&m, &c, 3).is_err());
    }

    #[test]
    fn foreign_path_has_zero_probability() {
        let c = corpus(&[(&["a", "b", "c"], 1)]);
        let m = build_multi_order(&c, 1).unwrap();
        let other = corpus(&[(&["a", "c"], 1)]);
        match log_likelihood(&m, &other, 1) {
            Err(Error::ZeroProbabilityPath { path, order }) => {
                assert_eq!(path, "a,c");
                assert_eq!(order, 1);
            }
            r => panic!("unexpected {r:?}"),
        }
    }

    #[test]
    fn dof_examples() {
        assert_eq!(degrees_of_freedom(&arcs(2, &[(0, 1)]), 1).unwrap(), 1);
        let cycle = arcs(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(degrees_of_freedom(&cycle, 2).unwrap(), 2);
        assert_eq!(degrees_of_freedom(&cycle, 0).unwrap(), 2);
        let complete = arcs(3, &[(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]);
        assert_eq!(degrees_of_freedom(&complete, 1).unwrap(), 5);
        assert_eq!(
            degrees_of_freedom(&arcs(0, &[]), 1),
            Err(Error::EmptyNetwork)
        );
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(p_value(0.0, 0).unwrap(), 1.0);
        assert_eq!(p_value(0.0, 4).unwrap(), 1.0);
        assert!((p_value(4.0, 1).unwrap() - 0.0455).abs() < 5e-5);
        assert!((p_value(0.5, 5).unwrap() - 0.9921).abs() < 5e-5);
    }

    #[test]
    fn lambda_clamping() {
        assert_eq!(clamp_lambda(-5e-10).unwrap(), 0.0);
        assert_eq!(clamp_lambda(2.0).unwrap(), 2.0);
        assert!(clamp_lambda(-1e-6).is_err());
    }

    #[test]
    fn identical_likelihoods_give_unit_p() {
        let c = corpus(&[(&["a", "b", "c"], 1), (&["a", "b", "d"], 1)]);
        let m = build_multi_order(&c, 2).unwrap();
        let r = lrt(&m, &c, 1).unwrap();
        assert_eq!(r.lambda, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(lrt(&m, &c, 2).is_err());
    }

    #[test]
    fn deterministic_corpus_selects_first_order() {
        let c = corpus(&[(&["a", "b", "c", "d", "e"], 7)]);
        let m = build_multi_order(&c, 4).unwrap();
        let sel = optimal_order(&m, &c, 0.05, 4).unwrap();
        assert_eq!(sel.optimal_order, 1);
        assert_eq!(sel.trace.len(), 1);
        assert_eq!(sel.trace[0].p_value, 1.0);
        assert!(!sel.truncated);
        assert!(optimal_order(&m, &c, 0.0, 4).is_err());
        assert!(optimal_order(&m, &c, 0.05, 5).is_err());
    }

    #[test]
    fn second_order_memory_is_detected() {
        // x,a -> c and y,a -> d, repeated enough to be significant.
        let c = corpus(&[(&["x", "a", "c"], 50), (&["y", "a", "d"], 50)]);
        let m = build_multi_order(&c, 3).unwrap();
        let sel = optimal_order(&m, &c, 0.05, 3).unwrap();
        assert_eq!(sel.optimal_order, 2);
        assert!(sel.trace[0].p_value < 1e-10);
        let again = optimal_order(&m, &c, 0.05, 3).unwrap();
        assert_eq!(sel, again);
    }

    fn arb_corpus() -> impl Strategy<Value = PathCorpus> {
        let path = (prop::collection::vec(0u8..4, 1..10), 1u64..5);
        prop::collection::vec(path, 1..20).prop_map(|ps| {
            PathCorpus::from_token_paths(
                ps.into_iter()
                    .map(|(nodes, m)| (nodes.into_iter().map(|n| alloc::format!("v{n}")), m)),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn likelihood_is_nested(c in arb_corpus()) {
            let m = build_multi_order(&c, 5).unwrap();
            let lls: Vec<f64> = (1..=5).map(|k| log_likelihood(&m, &c, k).unwrap()).collect();
            for w in lls.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-9);
            }
            for k in 1..5 {
                let r = lrt(&m, &c, k).unwrap();
                prop_assert!(r.lambda >= 0.0);
                prop_assert!((0.0..=1.0).contains(&r.p_value));
                let direct = -2.0 * (r.log_likelihood_null - r.log_likelihood_alt);
                prop_assert!((direct.max(0.0) - r.lambda).abs() <= 1e-8 * (1.0 + r.lambda));
            }
        }
    }
}

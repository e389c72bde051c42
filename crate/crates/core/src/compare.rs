//! Cross-scenario comparison: degree-distribution KL divergence, cosine
//! similarity of multi-order feature vectors, and side-by-side ranking and
//! prediction curves.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::analytics::{
    degree_distribution, structural_report, DegreeDirection, DegreeDistribution, ReportOptions,
    StructuralReport,
};
use crate::corpus::PathCorpus;
use crate::hon::{build_multi_order, MultiOrderModel};
use crate::prediction::{prediction_accuracy, AccuracyReport};
use crate::ranking::{pagerank_alignment, AlignmentPoint, PageRankOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    Nodes,
    Edges,
    Diameter,
    AvgSp,
    Density,
    GccRatio,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Nodes,
        Metric::Edges,
        Metric::Diameter,
        Metric::AvgSp,
        Metric::Density,
        Metric::GccRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Nodes => "nodes",
            Metric::Edges => "edges",
            Metric::Diameter => "diameter",
            Metric::AvgSp => "avg_sp",
            Metric::Density => "density",
            Metric::GccRatio => "gcc_ratio",
        }
    }

    pub fn of(self, r: &StructuralReport) -> f64 {
        match self {
            Metric::Nodes => r.node_count as f64,
            Metric::Edges => r.edge_count as f64,
            Metric::Diameter => f64::from(r.diameter),
            Metric::AvgSp => r.avg_shortest_path,
            Metric::Density => r.density,
            Metric::GccRatio => r.gcc_ratio,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw values of one metric across orders `1..=K`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FeatureVector {
    pub metric: Metric,
    pub values: Vec<f64>,
}

/// KL divergence `D(p ‖ q)` in nats over the union support, after adding
/// `smoothing` to every mass on both sides and renormalizing.
pub fn kl_divergence(
    p: &DegreeDistribution,
    q: &DegreeDistribution,
    smoothing: f64,
) -> Result<f64> {
    if !(smoothing.is_finite() && smoothing > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "smoothing epsilon must be positive (got {smoothing})"
        )));
    }
    let support: BTreeSet<usize> = p.pmf.keys().chain(q.pmf.keys()).copied().collect();
    let smooth = |d: &DegreeDistribution| -> Vec<f64> {
        let raw: Vec<f64> = support
            .iter()
            .map(|k| d.pmf.get(k).copied().unwrap_or(0.0) + smoothing)
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    };
    let (ps, qs) = (smooth(p), smooth(q));
    let kl: f64 = ps
        .iter()
        .zip(&qs)
        .map(|(&a, &b)| a * libm::log(a / b))
        .sum();
    Ok(kl.max(0.0))
}

/// One vector per metric from reports covering orders `1..=K` in sequence.
pub fn feature_vectors(reports: &[StructuralReport]) -> Result<Vec<FeatureVector>> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("no reports given".into()));
    }
    for (i, r) in reports.iter().enumerate() {
        if r.order != i + 1 {
            return Err(Error::InvalidArgument(alloc::format!(
                "reports must cover orders 1..={} contiguously (position {} has order {})",
                reports.len(),
                i,
                r.order
            )));
        }
    }
    Ok(Metric::ALL
        .iter()
        .map(|&metric| FeatureVector {
            metric,
            values: reports.iter().map(|r| metric.of(r)).collect(),
        })
        .collect())
}

pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::InvalidArgument(alloc::format!(
            "vectors must have equal non-zero length ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = libm::sqrt(u.iter().map(|a| a * a).sum());
    let nv = libm::sqrt(v.iter().map(|a| a * a).sum());
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::InvalidArgument(
            "cosine similarity of a zero vector".into(),
        ));
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CompareConfig {
    pub max_order: usize,
    pub kl_epsilon: f64,
    pub direction: DegreeDirection,
    pub pagerank: PageRankOptions,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub report: ReportOptions,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            max_order: 5,
            kl_epsilon: 1e-10,
            direction: DegreeDirection::Out,
            pagerank: PageRankOptions::default(),
            report: ReportOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MetricSimilarity {
    pub metric: Metric,
    /// `None` when either feature vector is all zeros.
    pub cosine: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OrderComparison {
    pub order: usize,
    /// `D(a ‖ b)`; `None` when either layer is empty.
    pub kl_divergence: Option<f64>,
    pub tau_a: Option<f64>,
    pub tau_b: Option<f64>,
    pub tau_delta: Option<f64>,
    pub accuracy_a: Option<f64>,
    pub accuracy_b: Option<f64>,
    pub accuracy_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComparisonReport {
    pub scenario_a: String,
    pub scenario_b: String,
    pub reports_a: Vec<StructuralReport>,
    pub reports_b: Vec<StructuralReport>,
    pub similarity: Vec<MetricSimilarity>,
    pub orders: Vec<OrderComparison>,
    pub alignment_a: Vec<AlignmentPoint>,
    pub alignment_b: Vec<AlignmentPoint>,
}

struct Scenario {
    model: MultiOrderModel,
    reports: Vec<StructuralReport>,
    alignment: Vec<AlignmentPoint>,
    accuracy: Vec<Option<AccuracyReport>>,
}

fn scenario(corpus: &PathCorpus, cfg: &CompareConfig) -> Result<Scenario> {
    let model = build_multi_order(corpus, cfg.max_order)?;
    let reports = model
        .layers()
        .iter()
        .map(|h| structural_report(h, &cfg.report))
        .collect();
    let alignment = pagerank_alignment(corpus, cfg.max_order, &cfg.pagerank)?;
    let has_transitions = corpus.paths().iter().any(|p| p.len() > 1);
    let accuracy = (1..=cfg.max_order)
        .map(|k| {
            has_transitions
                .then(|| prediction_accuracy(&model, corpus, k))
                .transpose()
        })
        .collect::<Result<_>>()?;
    Ok(Scenario {
        model,
        reports,
        alignment,
        accuracy,
    })
}

fn delta(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

/// Builds layers `1..=max_order` for both corpora and compares them.
pub fn comparison_report(
    label_a: &str,
    corpus_a: &PathCorpus,
    label_b: &str,
    corpus_b: &PathCorpus,
    cfg: &CompareConfig,
) -> Result<ComparisonReport> {
    let a = scenario(corpus_a, cfg)?;
    let b = scenario(corpus_b, cfg)?;

    let fa = feature_vectors(&a.reports)?;
    let fb = feature_vectors(&b.reports)?;
    let similarity = fa
        .iter()
        .zip(&fb)
        .map(|(u, v)| MetricSimilarity {
            metric: u.metric,
            cosine: cosine_similarity(&u.values, &v.values).ok(),
        })
        .collect();

    let mut orders = Vec::with_capacity(cfg.max_order);
    for k in 1..=cfg.max_order {
        let (la, lb) = (&a.model.layers()[k - 1], &b.model.layers()[k - 1]);
        let kl = if la.is_empty() || lb.is_empty() {
            None
        } else {
            let p = degree_distribution(la, cfg.direction)?;
            let q = degree_distribution(lb, cfg.direction)?;
            Some(kl_divergence(&p, &q, cfg.kl_epsilon)?)
        };
        let tau_a = a.alignment[k - 1].tau;
        let tau_b = b.alignment[k - 1].tau;
        let acc_a = a.accuracy[k - 1].as_ref().map(|r| r.accuracy);
        let acc_b = b.accuracy[k - 1].as_ref().map(|r| r.accuracy);
        orders.push(OrderComparison {
            order: k,
            kl_divergence: kl,
            tau_a,
            tau_b,
            tau_delta: delta(tau_a, tau_b),
            accuracy_a: acc_a,
            accuracy_b: acc_b,
            accuracy_delta: delta(acc_a, acc_b),
        });
    }

    Ok(ComparisonReport {
        scenario_a: label_a.into(),
        scenario_b: label_b.into(),
        reports_a: a.reports,
        reports_b: b.reports,
        similarity,
        orders,
        alignment_a: a.alignment,
        alignment_b: b.alignment,
    })
}

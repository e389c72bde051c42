//! Next-node prediction with fallback to shorter contexts.

use alloc::vec::Vec;

use crate::corpus::{NodeIndex, PathCorpus};
use crate::hon::MultiOrderModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prediction {
    pub node: Option<NodeIndex>,
    /// Context length that produced the prediction; 0 when nothing matched.
    pub used_order: usize,
}

/// Outcome of predicting one transition of an evaluation path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionOutcome {
    pub history: Vec<Option<NodeIndex>>,
    pub predicted: Option<NodeIndex>,
    pub actual: Option<NodeIndex>,
    pub used_order: usize,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AccuracyReport {
    pub order: usize,
    pub accuracy: f64,
    pub evaluated_transitions: u64,
    pub correct: u64,
    /// Transitions for which no context was observed at any order.
    pub none_count: u64,
}

impl AccuracyReport {
    pub fn none_rate(&self) -> f64 {
        self.none_count as f64 / self.evaluated_transitions as f64
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

/// Prediction over a history that may contain nodes unknown to the model.
fn predict_aligned(model: &MultiOrderModel, history: &[Option<NodeIndex>], k: usize) -> Prediction {
    let mut context = Vec::with_capacity(k);
    for c in (1..=k.min(history.len())).rev() {
        context.clear();
        let window = &history[history.len() - c..];
        if window.iter().any(Option::is_none) {
            continue;
        }
        context.extend(window.iter().flatten());
        let Some(out) = model.continuations(&context) else {
            continue;
        };
        let layer = model
            .layer(c)
            .expect("continuations imply the layer exists");
        // Highest count wins; ties go to the lexicographically smallest token.
        let best = out
            .iter()
            .map(|e| layer.terminal(e.to))
            .zip(out.iter().map(|e| e.count))
            .min_by(|(a, ca), (b, cb)| {
                cb.cmp(ca)
                    .then_with(|| model.token_rank(*a).cmp(&model.token_rank(*b)))
            })
            .map(|(n, _)| n);
        return Prediction {
            node: best,
            used_order: c,
        };
    }
    Prediction {
        node: None,
        used_order: 0,
    }
}

/// Most probable continuation of `history`, trying the longest available
/// context up to `k` first and falling back to shorter ones.
pub fn predict_next(
    model: &MultiOrderModel,
    history: &[NodeIndex],
    k: usize,
) -> Result<Prediction> {
    check_order(model, k)?;
    if history.is_empty() {
        return Err(Error::InvalidArgument("history must not be empty".into()));
    }
    let h: Vec<Option<NodeIndex>> = history.iter().copied().map(Some).collect();
    Ok(predict_aligned(model, &h, k))
}

/// Token-level wrapper; unknown tokens never match a context.
pub fn predict_next_tokens<'m>(
    model: &'m MultiOrderModel,
    history: &[&str],
    k: usize,
) -> Result<(Option<&'m str>, usize)> {
    check_order(model, k)?;
    if history.is_empty() {
        return Err(Error::InvalidArgument("history must not be empty".into()));
    }
    let h: Vec<Option<NodeIndex>> = history.iter().map(|t| model.index_of(t)).collect();
    let p = predict_aligned(model, &h, k);
    Ok((p.node.map(|n| model.token(n)), p.used_order))
}

/// Outcomes for every transition of one path of `eval`, in order.
pub fn path_outcomes(
    model: &MultiOrderModel,
    aligned: &[Option<NodeIndex>],
    k: usize,
) -> Vec<PredictionOutcome> {
    (1..aligned.len())
        .map(|t| {
            let p = predict_aligned(model, &aligned[..t], k);
            PredictionOutcome {
                history: aligned[..t].to_vec(),
                predicted: p.node,
                actual: aligned[t],
                used_order: p.used_order,
                correct: p.node.is_some() && p.node == aligned[t],
            }
        })
        .collect()
}

/// Top-1 accuracy over every transition of `eval`, weighted by
/// multiplicity. Missing predictions count as wrong.
pub fn prediction_accuracy(
    model: &MultiOrderModel,
    eval: &PathCorpus,
    k: usize,
) -> Result<AccuracyReport> {
    check_order(model, k)?;
    let map = model.align(eval);
    let (mut total, mut correct, mut none) = (0u64, 0u64, 0u64);
    for path in eval.paths() {
        let aligned: Vec<Option<NodeIndex>> = path.nodes().iter().map(|n| map[n.index()]).collect();
        let m = path.multiplicity();
        for t in 1..aligned.len() {
            let p = predict_aligned(model, &aligned[..t], k);
            total += m;
            match p.node {
                None => none += m,
                Some(n) if Some(n) == aligned[t] => correct += m,
                Some(_) => {}
            }
        }
    }
    if total == 0 {
        return Err(Error::InvalidArgument(
            "evaluation corpus has no transitions".into(),
        ));
    }
    Ok(AccuracyReport {
        order: k,
        accuracy: correct as f64 / total as f64,
        evaluated_transitions: total,
        correct,
        none_count: none,
    })
}

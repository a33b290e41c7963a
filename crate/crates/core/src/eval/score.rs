use alloc::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::db::DiffTuple;

/// Exact-match precision, recall and F1 of one instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl InstanceScore {
    /// The score of an instance the system failed on.
    pub fn zero(gold: usize) -> Self {
        Self {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
            matched: 0,
            predicted: 0,
            gold,
        }
    }
}

/// Scores predicted changes against gold ones. A tuple counts only when
/// all five fields are equal.
pub fn score_instance(
    predicted: &BTreeSet<DiffTuple>,
    gold: &BTreeSet<DiffTuple>,
) -> InstanceScore {
    let matched = predicted.intersection(gold).count();
    let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    let precision = ratio(matched, predicted.len());
    let recall = ratio(matched, gold.len());
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    InstanceScore {
        precision,
        recall,
        f1,
        matched,
        predicted: predicted.len(),
        gold: gold.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("macro-F1 of an empty list of scores")]
pub struct EmptyScores;

/// Mean of the per-instance F1 scores.
pub fn macro_f1(scores: &[InstanceScore]) -> Result<f64, EmptyScores> {
    if scores.is_empty() {
        return Err(EmptyScores);
    }
    Ok(scores.iter().map(|s| s.f1).sum::<f64>() / scores.len() as f64)
}

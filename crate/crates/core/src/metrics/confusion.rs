use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }
}

/// Counts with `y_hat = 1` iff `p > tau`.
pub fn confusion_counts(labels: &[u8], probs: &[f64], tau: f64) -> Result<ConfusionCounts> {
    Error::check_len(labels.len(), probs.len())?;
    let mut c = ConfusionCounts::default();
    for (&y, &p) in labels.iter().zip(probs) {
        match (y == 1, p > tau) {
            (true, true) => c.tp += 1,
            (true, false) => c.fn_ += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecallF1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision is 0 when nothing is predicted positive, recall is 0 without
/// positives, and F1 is 0 when both are 0.
pub fn precision_recall_f1(c: &ConfusionCounts) -> PrecisionRecallF1 {
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    PrecisionRecallF1 {
        precision,
        recall,
        f1,
    }
}

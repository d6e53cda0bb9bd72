use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedThreshold {
    pub threshold: f64,
    pub f1: f64,
}

/// F1-maximizing threshold for the rule `p > tau`.
///
/// Candidates are the distinct probabilities together with 0 and 1; among
/// equal F1 values the smallest candidate wins.
pub fn tune_threshold(probs: &[f64], labels: &[u8]) -> Result<TunedThreshold> {
    Error::check_len(labels.len(), probs.len())?;
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Parameter(format!("probability {p} outside [0, 1]")));
    }
    let positives = labels.iter().filter(|&&y| y == 1).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::Degenerate(
            "threshold tuning needs both classes in the labels".into(),
        ));
    }

    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| probs[i]).collect();
    // positives_at_or_below[k] = positives among the k smallest probabilities
    let mut positives_at_or_below = Vec::with_capacity(sorted.len() + 1);
    positives_at_or_below.push(0usize);
    for &i in &order {
        let last = *positives_at_or_below.last().unwrap();
        positives_at_or_below.push(last + usize::from(labels[i] == 1));
    }

    let mut candidates: Vec<f64> = std::iter::once(0.0)
        .chain(sorted.iter().copied())
        .chain(std::iter::once(1.0))
        .collect();
    candidates.dedup();

    let mut best = TunedThreshold {
        threshold: f64::NAN,
        f1: -1.0,
    };
    for tau in candidates {
        let below = sorted.partition_point(|&p| p <= tau);
        let predicted = sorted.len() - below;
        let tp = positives - positives_at_or_below[below];
        let f1 = if tp == 0 {
            0.0
        } else {
            2.0 * tp as f64 / (predicted + positives) as f64
        };
        if f1 > best.f1 {
            best = TunedThreshold { threshold: tau, f1 };
        }
    }
    Ok(best)
}

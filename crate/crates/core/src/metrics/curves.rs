//! ROC and precision-recall curves over every distinct score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// x = false positive rate, y = recall
    Roc,
    /// x = recall, y = precision
    Pr,
}

/// A point of a curve. Rows with `score >= threshold` count as positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoints {
    pub kind: CurveKind,
    /// Ordered by strictly decreasing threshold.
    pub points: Vec<CurvePoint>,
}

/// `(threshold, tp, fp)` after a group of tied scores.
type Step = (f64, usize, usize);

/// Cumulative (tp, fp) after each group of tied scores, scanning from the
/// highest score down.
fn cumulative_counts(labels: &[u8], probs: &[f64]) -> Result<(Vec<Step>, usize, usize)> {
    Error::check_len(labels.len(), probs.len())?;
    if probs.iter().any(|p| p.is_nan()) {
        return Err(Error::Parameter("scores contain NaN".into()));
    }
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
    let mut out: Vec<Step> = Vec::new();
    let (mut tp, mut fp) = (0, 0);
    for (k, &i) in order.iter().enumerate() {
        if labels[i] == 1 {
            tp += 1;
        } else {
            fp += 1;
        }
        let last_of_group = k + 1 == order.len() || probs[order[k + 1]] != probs[i];
        if last_of_group {
            out.push((probs[i], tp, fp));
        }
    }
    Ok((out, tp, fp))
}

pub fn roc_curve(labels: &[u8], probs: &[f64]) -> Result<CurvePoints> {
    let (groups, pos, neg) = cumulative_counts(labels, probs)?;
    if pos == 0 || neg == 0 {
        return Err(Error::Degenerate("ROC curve needs both classes".into()));
    }
    let mut points = vec![CurvePoint {
        threshold: f64::INFINITY,
        x: 0.0,
        y: 0.0,
    }];
    points.extend(groups.into_iter().map(|(t, tp, fp)| CurvePoint {
        threshold: t,
        x: fp as f64 / neg as f64,
        y: tp as f64 / pos as f64,
    }));
    Ok(CurvePoints {
        kind: CurveKind::Roc,
        points,
    })
}

/// Trapezoidal area under the ROC curve. Ties between a positive and a
/// negative score count one half.
pub fn auc_roc(labels: &[u8], probs: &[f64]) -> Result<f64> {
    let curve = roc_curve(labels, probs)?;
    Ok(curve
        .points
        .windows(2)
        .map(|w| (w[1].x - w[0].x) * (w[1].y + w[0].y) / 2.0)
        .sum())
}

pub fn pr_curve(labels: &[u8], probs: &[f64]) -> Result<CurvePoints> {
    let (groups, pos, _) = cumulative_counts(labels, probs)?;
    if pos == 0 {
        return Err(Error::Degenerate(
            "PR curve needs at least one positive".into(),
        ));
    }
    Ok(CurvePoints {
        kind: CurveKind::Pr,
        points: groups
            .into_iter()
            .map(|(t, tp, fp)| CurvePoint {
                threshold: t,
                x: tp as f64 / pos as f64,
                y: tp as f64 / (tp + fp) as f64,
            })
            .collect(),
    })
}

/// Average precision: `sum_k (R_k - R_{k-1}) P_k`, a step-wise area under
/// the PR curve starting from recall 0.
pub fn auc_pr(labels: &[u8], probs: &[f64]) -> Result<f64> {
    let curve = pr_curve(labels, probs)?;
    let mut prev_recall = 0.0;
    let mut area = 0.0;
    for p in &curve.points {
        area += (p.x - prev_recall) * p.y;
        prev_recall = p.x;
    }
    Ok(area)
}

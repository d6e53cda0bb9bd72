use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Predicted probabilities are clipped to `[PROB_EPS, 1 - PROB_EPS]` before
/// any logarithm.
pub const PROB_EPS: f64 = 1e-7;

pub fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

/// How the positive-class weight is derived from the training labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaMode {
    /// `alpha = n+ / N`, weighting the positive term by the prevalence.
    Prevalence,
    /// `alpha = 1 - n+ / N`, so both classes carry equal total weight.
    #[default]
    Complement,
}

/// Positive-class weight of the balanced cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalancedLossConfig {
    pub alpha: f64,
}

impl BalancedLossConfig {
    pub fn from_labels(labels: &[u8], mode: AlphaMode) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Precondition(
                "no labels to compute alpha from".into(),
            ));
        }
        let pos = labels.iter().filter(|&&y| y == 1).count();
        let prevalence = pos as f64 / labels.len() as f64;
        let alpha = match mode {
            AlphaMode::Prevalence => prevalence,
            AlphaMode::Complement => 1.0 - prevalence,
        };
        Ok(Self { alpha })
    }
}

/// Loss of one instance, `-[a y log p + (1 - a)(1 - y) log(1 - p)]`.
#[inline]
pub fn balanced_bce_term(y: u8, p: f64, alpha: f64) -> f64 {
    let p = clamp_prob(p);
    if y == 1 {
        -alpha * p.ln()
    } else {
        -(1.0 - alpha) * (1.0 - p).ln()
    }
}

/// Mean class-weighted binary cross-entropy.
pub fn balanced_bce_loss(labels: &[u8], probs: &[f64], alpha: f64) -> Result<f64> {
    Error::check_len(labels.len(), probs.len())?;
    if labels.is_empty() {
        return Err(Error::Precondition("empty input".into()));
    }
    let sum: f64 = labels
        .iter()
        .zip(probs)
        .map(|(&y, &p)| balanced_bce_term(y, p, alpha))
        .sum();
    Ok(sum / labels.len() as f64)
}

use crate::error::{Error, Result};
use crate::models::clamp_prob;

fn check(labels: &[u8], probs: &[f64]) -> Result<()> {
    Error::check_len(labels.len(), probs.len())?;
    if labels.is_empty() {
        return Err(Error::Precondition("empty input".into()));
    }
    Ok(())
}

/// Mean negative log-likelihood with probabilities clipped at 1e-7.
pub fn bce(labels: &[u8], probs: &[f64]) -> Result<f64> {
    check(labels, probs)?;
    let sum: f64 = labels
        .iter()
        .zip(probs)
        .map(|(&y, &p)| {
            let p = clamp_prob(p);
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    Ok(sum / labels.len() as f64)
}

/// Brier score, the mean squared difference between label and probability.
pub fn brier(labels: &[u8], probs: &[f64]) -> Result<f64> {
    check(labels, probs)?;
    let sum: f64 = labels
        .iter()
        .zip(probs)
        .map(|(&y, &p)| (f64::from(y) - p).powi(2))
        .sum();
    Ok(sum / labels.len() as f64)
}

/// Mean default rate: the average probability, in percent.
pub fn mdr(probs: &[f64]) -> Result<f64> {
    if probs.is_empty() {
        return Err(Error::Precondition("empty input".into()));
    }
    Ok(100.0 * probs.iter().sum::<f64>() / probs.len() as f64)
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::confusion::{confusion_counts, precision_recall_f1, ConfusionCounts};
use super::curves::{auc_pr, auc_roc};
use super::reliability::{ece, mce, reliability_bins, BinAccuracy, ReliabilityBins};
use super::scores::{bce, brier, mdr};
use crate::error::{Error, Result};
use crate::io;

/// Every evaluation metric for one set of predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub tau: f64,
    pub confusion: ConfusionCounts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// `None` when only one class is present.
    pub auc_roc: Option<f64>,
    /// `None` without positives.
    pub auc_pr: Option<f64>,
    pub bce: f64,
    pub brier: f64,
    pub mdr_percent: f64,
    pub ece: f64,
    pub mce: f64,
    pub reliability: ReliabilityBins,
}

impl MetricsReport {
    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        io::write_json(path, self)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        io::read_json(path)
    }
}

/// Report whose bin accuracy is the thresholded accuracy at `tau`.
pub fn full_report(labels: &[u8], probs: &[f64], tau: f64, bins: usize) -> Result<MetricsReport> {
    full_report_with(labels, probs, tau, bins, BinAccuracy::Thresholded(tau))
}

pub fn full_report_with(
    labels: &[u8],
    probs: &[f64],
    tau: f64,
    bins: usize,
    accuracy: BinAccuracy,
) -> Result<MetricsReport> {
    Error::check_len(labels.len(), probs.len())?;
    let confusion = confusion_counts(labels, probs, tau)?;
    let prf = precision_recall_f1(&confusion);
    let reliability = reliability_bins(labels, probs, accuracy, bins)?;
    let optional = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(MetricsReport {
        n: labels.len(),
        tau,
        confusion,
        precision: prf.precision,
        recall: prf.recall,
        f1: prf.f1,
        auc_roc: optional(auc_roc(labels, probs))?,
        auc_pr: optional(auc_pr(labels, probs))?,
        bce: bce(labels, probs)?,
        brier: brier(labels, probs)?,
        mdr_percent: mdr(probs)?,
        ece: ece(&reliability)?,
        mce: mce(&reliability)?,
        reliability,
    })
}

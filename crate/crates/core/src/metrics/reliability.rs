//! Reliability-diagram bins and the calibration errors derived from them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::confusion::confusion_counts;
use crate::error::{Error, Result};
use crate::io::{self, fmt_f64};

/// What a bin's "accuracy" measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "tau")]
pub enum BinAccuracy {
    /// Share of rows whose thresholded class `p > tau` equals the label.
    Thresholded(f64),
    /// Share of positive labels, the observed event frequency.
    EventRate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBin {
    /// 1-based.
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// `None` for empty bins.
    pub accuracy: Option<f64>,
    pub confidence: Option<f64>,
}

impl ReliabilityBin {
    pub fn gap(&self) -> Option<f64> {
        Some((self.accuracy? - self.confidence?).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBins {
    pub accuracy: BinAccuracy,
    pub bins: Vec<ReliabilityBin>,
}

impl ReliabilityBins {
    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = io::csv_writer(path)?;
        w.write_record([
            "bin_index",
            "lower",
            "upper",
            "count",
            "accuracy",
            "confidence",
        ])?;
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        for b in &self.bins {
            w.write_record([
                b.index.to_string(),
                fmt_f64(b.lower),
                fmt_f64(b.upper),
                b.count.to_string(),
                opt(b.accuracy),
                opt(b.confidence),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Bin `m` (1-based) covers `((m-1)/M, m/M]`; `p = 0` goes to bin 1.
pub fn bin_index(p: f64, bins: usize) -> usize {
    let m_f = bins as f64;
    let mut m = ((p * m_f).ceil() as isize).clamp(1, bins as isize) as usize;
    // correct the rounding of p * M against the exact interval ends
    while m > 1 && p <= (m - 1) as f64 / m_f {
        m -= 1;
    }
    while m < bins && p > m as f64 / m_f {
        m += 1;
    }
    m
}

pub fn reliability_bins(
    labels: &[u8],
    probs: &[f64],
    accuracy: BinAccuracy,
    bins: usize,
) -> Result<ReliabilityBins> {
    Error::check_len(labels.len(), probs.len())?;
    if bins == 0 {
        return Err(Error::Parameter("bin count must be at least 1".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Parameter(format!("probability {p} outside [0, 1]")));
    }
    let mut members: Vec<(Vec<u8>, Vec<f64>)> = vec![(Vec::new(), Vec::new()); bins];
    for (&y, &p) in labels.iter().zip(probs) {
        let m = bin_index(p, bins) - 1;
        members[m].0.push(y);
        members[m].1.push(p);
    }
    let out = members
        .into_iter()
        .enumerate()
        .map(|(k, (ys, ps))| {
            let count = ys.len();
            let (acc, conf) = if count == 0 {
                (None, None)
            } else {
                let acc = match accuracy {
                    BinAccuracy::Thresholded(tau) => confusion_counts(&ys, &ps, tau)
                        .expect("lengths agree")
                        .accuracy(),
                    BinAccuracy::EventRate => {
                        ys.iter().filter(|&&y| y == 1).count() as f64 / count as f64
                    }
                };
                (Some(acc), Some(ps.iter().sum::<f64>() / count as f64))
            };
            ReliabilityBin {
                index: k + 1,
                lower: k as f64 / bins as f64,
                upper: (k + 1) as f64 / bins as f64,
                count,
                accuracy: acc,
                confidence: conf,
            }
        })
        .collect();
    Ok(ReliabilityBins {
        accuracy,
        bins: out,
    })
}

/// Expected calibration error: bin gaps weighted by bin size.
pub fn ece(bins: &ReliabilityBins) -> Result<f64> {
    let n = bins.total();
    if n == 0 {
        return Err(Error::Precondition("all bins are empty".into()));
    }
    Ok(bins
        .bins
        .iter()
        .filter_map(|b| b.gap().map(|g| b.count as f64 / n as f64 * g))
        .sum())
}

/// Maximum calibration error over the non-empty bins.
pub fn mce(bins: &ReliabilityBins) -> Result<f64> {
    bins.bins
        .iter()
        .filter_map(ReliabilityBin::gap)
        .reduce(f64::max)
        .ok_or_else(|| Error::Precondition("all bins are empty".into()))
}

//! Discrimination and calibration metrics.

mod confusion;
mod curves;
mod reliability;
mod report;
mod scores;

pub use confusion::{confusion_counts, precision_recall_f1, ConfusionCounts, PrecisionRecallF1};
pub use curves::{auc_pr, auc_roc, pr_curve, roc_curve, CurveKind, CurvePoint, CurvePoints};
pub use reliability::{
    bin_index, ece, mce, reliability_bins, BinAccuracy, ReliabilityBin, ReliabilityBins,
};
pub use report::{full_report, full_report_with, MetricsReport};
pub use scores::{bce, brier, mdr};

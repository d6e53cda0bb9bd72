use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use credit_calib::data::FeatureSetKind;
use credit_calib::models::ModelKind;

#[derive(Debug, Parser)]
#[command(
    name = "credit-calib",
    version,
    about = "Credit default scoring with calibrated probabilities"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Output root directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// static, dynamic or all.
    #[arg(long, global = true, value_name = "SET")]
    pub features: Option<FeatureSetKind>,

    /// logreg or ffnn.
    #[arg(long, global = true, value_name = "KIND")]
    pub model: Option<ModelKind>,

    /// Reliability bin count.
    #[arg(long, global = true, value_name = "M", value_parser = clap::value_parser!(u64).range(1..))]
    pub bins: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split, encode and standardize the raw CSV.
    Prepare {
        /// Raw credit CSV (falls back to the config, then $CREDIT_CSV).
        #[arg(long, value_name = "PATH")]
        data: Option<PathBuf>,
    },
    /// Train a classifier on prepared splits and report its performance.
    Train,
    /// Fit calibrators on validation probabilities and score them on the test split.
    Calibrate {
        /// Comma-separated methods such as `platt,sure-kumaraswamy+platt`;
        /// `none` keeps only the uncalibrated baseline.
        #[arg(long, value_name = "LIST")]
        plan: Option<String>,
    },
    /// Reliability bins, ECE and MCE of a calibrated-probability CSV.
    Reliability(ProbsInput),
    /// Full metrics report of a calibrated-probability CSV.
    Report(ProbsInput),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbColumn {
    Calibrated,
    Raw,
}

#[derive(Debug, Args)]
pub struct ProbsInput {
    /// CSV with columns row_id, raw_prob, calibrated_prob, label.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,

    /// Which probability column to evaluate.
    #[arg(long, value_enum, default_value_t = ProbColumn::Calibrated)]
    pub column: ProbColumn,

    /// Decision threshold. For `reliability`, setting it switches bin
    /// accuracy from the observed event rate to thresholded accuracy.
    #[arg(long, value_name = "TAU")]
    pub tau: Option<f64>,

    /// Output file (defaults to a name under --out).
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema error: {0}")]
    Schema(String),

    /// `row` is 1-based and counts data rows only (the header is row 0).
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Diverged { epoch: usize },

    #[error("{0}")]
    Degenerate(String),

    #[error("did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NotConverged {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error(
        "constraint not satisfied after {rounds} penalty rounds: |C(theta)| = {constraint:.6} \
         at theta = ({theta1}, {theta2})"
    )]
    Infeasible {
        rounds: usize,
        theta1: f64,
        theta2: f64,
        constraint: f64,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::Dimension { expected, actual })
        }
    }
}

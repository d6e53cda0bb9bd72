use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::features::{EncodedColumn, EncodedKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub name: String,
    pub kind: EncodedKind,
    pub mean: f64,
    /// Population standard deviation. Always positive when `scaled`.
    pub std: f64,
    /// False for one-hot columns and for constant continuous columns.
    pub scaled: bool,
}

/// Per-column centering and scaling learnt from training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub columns: Vec<ColumnScale>,
}

impl Standardizer {
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// Names of continuous columns that had zero variance on the training
    /// rows and are passed through unscaled.
    pub fn passthrough_columns(&self) -> Vec<&str> {
        self.columns
            .iter()
            .filter(|c| c.kind == EncodedKind::Continuous && !c.scaled)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn apply(&self, matrix: &Array2<f64>) -> Result<Array2<f64>> {
        Error::check_len(self.width(), matrix.ncols())?;
        let mut out = matrix.clone();
        for (mut col, scale) in out.columns_mut().into_iter().zip(&self.columns) {
            if scale.scaled {
                col.mapv_inplace(|x| (x - scale.mean) / scale.std);
            }
        }
        Ok(out)
    }

    pub fn invert(&self, matrix: &Array2<f64>) -> Result<Array2<f64>> {
        Error::check_len(self.width(), matrix.ncols())?;
        let mut out = matrix.clone();
        for (mut col, scale) in out.columns_mut().into_iter().zip(&self.columns) {
            if scale.scaled {
                col.mapv_inplace(|z| z * scale.std + scale.mean);
            }
        }
        Ok(out)
    }
}

pub fn fit_standardizer(train: &Array2<f64>, columns: &[EncodedColumn]) -> Result<Standardizer> {
    Error::check_len(columns.len(), train.ncols())?;
    let n = train.nrows();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "need at least 2 training rows to standardize, got {n}"
        )));
    }
    let columns = columns
        .iter()
        .zip(train.columns())
        .map(|(col, values)| {
            if col.kind != EncodedKind::Continuous {
                return ColumnScale {
                    name: col.name.clone(),
                    kind: col.kind,
                    mean: 0.0,
                    std: 1.0,
                    scaled: false,
                };
            }
            let mean = values.sum() / n as f64;
            let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            let scaled = std > 0.0 && std.is_finite();
            if !scaled {
                log::warn!(
                    "column {} has zero variance on training rows; left unscaled",
                    col.name
                );
            }
            ColumnScale {
                name: col.name.clone(),
                kind: col.kind,
                mean,
                std: if scaled { std } else { 1.0 },
                scaled,
            }
        })
        .collect();
    Ok(Standardizer { columns })
}

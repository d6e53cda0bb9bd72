use std::fs::File;
use std::io::Read;
use std::path::Path;

use ndarray::{Array2, Axis};

use super::schema::{self, ColumnSpec};
use crate::error::{Error, Result};

/// Feature values and binary labels, one row per client.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub(crate) columns: Vec<ColumnSpec>,
    pub(crate) values: Array2<f64>,
    pub(crate) labels: Vec<u8>,
}

impl RawDataset {
    pub fn new(columns: Vec<ColumnSpec>, values: Array2<f64>, labels: Vec<u8>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Precondition("dataset has no rows".into()));
        }
        Error::check_len(labels.len(), values.nrows())?;
        Error::check_len(columns.len(), values.ncols())?;
        if let Some(row) = labels.iter().position(|&y| y > 1) {
            return Err(Error::Row {
                row: row + 1,
                message: format!("label {} is not 0 or 1", labels[row]),
            });
        }
        Ok(Self {
            columns,
            values,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<ndarray::ArrayView1<'_, f64>> {
        self.column_index(name).map(|j| self.values.column(j))
    }

    pub fn positive_count(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub fn positive_fraction(&self) -> f64 {
        self.positive_count() as f64 / self.len() as f64
    }

    /// Rows selected by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> RawDataset {
        RawDataset {
            columns: self.columns.clone(),
            values: self.values.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Reads the credit CSV. The ID column is dropped and the label column is
/// split off.
pub fn load_credit_csv(path: impl AsRef<Path>) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_credit_csv(file)
}

pub fn read_credit_csv<R: Read>(reader: R) -> Result<RawDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let expected = schema::expected_header();
    let expected_norm: Vec<String> = expected
        .iter()
        .map(|h| schema::normalize_header(h))
        .collect();

    let mut header = records
        .next()
        .ok_or_else(|| Error::Schema("empty file".into()))??;
    // Spreadsheet exports carry an extra "X1..X23,Y" code row above the
    // real header.
    if header.get(1).map(str::trim) == Some("X1") {
        header = records
            .next()
            .ok_or_else(|| Error::Schema("missing header row".into()))??;
    }
    let got: Vec<String> = header.iter().map(schema::normalize_header).collect();
    if got != expected_norm {
        let first_bad = got
            .iter()
            .zip(&expected_norm)
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| got.len().min(expected.len()));
        return Err(Error::Schema(format!(
            "unexpected header: expected {} columns starting {:?}, got {} columns (first mismatch at \
             position {}: {:?})",
            expected.len(),
            &expected[..3],
            got.len(),
            first_bad,
            header.get(first_bad).unwrap_or("<missing>"),
        )));
    }

    let n_features = expected.len() - 2;
    let mut flat = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() == 1 && record.get(0).is_some_and(|c| c.trim().is_empty()) {
            continue;
        }
        if record.len() != expected.len() {
            return Err(Error::Row {
                row,
                message: format!("expected {} cells, found {}", expected.len(), record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate().skip(1).take(n_features) {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Row {
                row,
                message: format!("column {} is not numeric: {:?}", expected[j], cell),
            })?;
            if !v.is_finite() {
                return Err(Error::Row {
                    row,
                    message: format!("column {} is not finite", expected[j]),
                });
            }
            flat.push(v);
        }
        let label = match record[expected.len() - 1].trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Row {
                    row,
                    message: format!("label must be 0 or 1, found {other:?}"),
                })
            }
        };
        labels.push(label);
    }

    let n = labels.len();
    let values =
        Array2::from_shape_vec((n, n_features), flat).map_err(|e| Error::Schema(e.to_string()))?;
    RawDataset::new(schema::raw_feature_columns(), values, labels)
}

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use ndarray::{concatenate, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::dataset::RawDataset;
use super::schema::{self, ColumnKind, ColumnSpec, FeatureGroup};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSetKind {
    Static,
    Dynamic,
    All,
}

impl FeatureSetKind {
    pub const ALL: [FeatureSetKind; 3] = [Self::Static, Self::Dynamic, Self::All];

    fn includes(self, group: FeatureGroup) -> bool {
        match self {
            Self::Static => group == FeatureGroup::Static,
            Self::Dynamic => group == FeatureGroup::Dynamic,
            Self::All => true,
        }
    }
}

impl fmt::Display for FeatureSetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Static => "static",
            Self::Dynamic => "dynamic",
            Self::All => "all",
        })
    }
}

impl FromStr for FeatureSetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(Self::Static),
            "dynamic" => Ok(Self::Dynamic),
            "all" => Ok(Self::All),
            other => Err(Error::Parameter(format!("unknown feature set {other:?}"))),
        }
    }
}

/// Appends `UTIL1..6 = BILL_AMTk / LIMIT_BAL`. Fails if the columns already
/// exist or any credit limit is not positive.
pub fn derive_utilization_features(ds: &RawDataset) -> Result<RawDataset> {
    if schema::UTILIZATION
        .iter()
        .any(|u| ds.column_index(u).is_some())
    {
        return Err(Error::Precondition(
            "utilization features have already been derived".into(),
        ));
    }
    let limit = ds
        .column(schema::LIMIT_COLUMN)
        .ok_or_else(|| Error::Schema(format!("missing column {}", schema::LIMIT_COLUMN)))?;
    if let Some(row) = limit.iter().position(|&l| l <= 0.0) {
        return Err(Error::Row {
            row: row + 1,
            message: format!(
                "{} must be positive, found {}",
                schema::LIMIT_COLUMN,
                limit[row]
            ),
        });
    }

    let mut ratios = Array2::zeros((ds.len(), schema::BILL_AMOUNTS.len()));
    for (k, bill_name) in schema::BILL_AMOUNTS.iter().enumerate() {
        let bill = ds
            .column(bill_name)
            .ok_or_else(|| Error::Schema(format!("missing column {bill_name}")))?;
        for (i, (b, l)) in bill.iter().zip(limit.iter()).enumerate() {
            ratios[[i, k]] = b / l;
        }
    }

    let mut columns = ds.columns.clone();
    columns.extend(schema::utilization_columns());
    let values =
        concatenate(Axis(1), &[ds.values.view(), ratios.view()]).expect("row counts agree");
    RawDataset::new(columns, values, ds.labels.clone())
}

/// A column-subset of a [`RawDataset`], categoricals still integer-coded.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFrame {
    pub kind: FeatureSetKind,
    pub columns: Vec<ColumnSpec>,
    pub values: Array2<f64>,
    pub labels: Vec<u8>,
}

impl FeatureFrame {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> FeatureFrame {
        FeatureFrame {
            kind: self.kind,
            columns: self.columns.clone(),
            values: self.values.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Picks the static, dynamic or all columns, keeping dataset column order.
pub fn select_feature_set(ds: &RawDataset, kind: FeatureSetKind) -> Result<FeatureFrame> {
    if kind != FeatureSetKind::Static
        && schema::UTILIZATION
            .iter()
            .any(|u| ds.column_index(u).is_none())
    {
        return Err(Error::Precondition(format!(
            "feature set {kind} needs the utilization features; derive them first"
        )));
    }
    let picked: Vec<usize> = ds
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| kind.includes(c.group))
        .map(|(j, _)| j)
        .collect();
    Ok(FeatureFrame {
        kind,
        columns: picked.iter().map(|&j| ds.columns[j].clone()).collect(),
        values: ds.values.select(Axis(1), &picked),
        labels: ds.labels.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodedKind {
    Continuous,
    /// Indicator for one level of a categorical column.
    OneHot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedColumn {
    pub name: String,
    pub kind: EncodedKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CategoricalLevels {
    source: String,
    levels: Vec<i64>,
}

/// One-hot encoding of categorical columns, levels learnt from training
/// rows. Levels never seen in training encode as all zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneHotEncoder {
    input: Vec<ColumnSpec>,
    categorical: Vec<CategoricalLevels>,
}

impl OneHotEncoder {
    pub fn fit(train: &FeatureFrame) -> Result<Self> {
        let mut categorical = Vec::new();
        for (j, col) in train.columns.iter().enumerate() {
            if col.kind != ColumnKind::Categorical {
                continue;
            }
            let mut levels = BTreeSet::new();
            for (i, &v) in train.values.column(j).iter().enumerate() {
                if v.fract() != 0.0 {
                    return Err(Error::Row {
                        row: i + 1,
                        message: format!("categorical {} has non-integer code {v}", col.name),
                    });
                }
                levels.insert(v as i64);
            }
            categorical.push(CategoricalLevels {
                source: col.name.clone(),
                levels: levels.into_iter().collect(),
            });
        }
        Ok(Self {
            input: train.columns.clone(),
            categorical,
        })
    }

    pub fn output_columns(&self) -> Vec<EncodedColumn> {
        let mut out = Vec::new();
        let mut cats = self.categorical.iter();
        for col in &self.input {
            match col.kind {
                ColumnKind::Continuous => out.push(EncodedColumn {
                    name: col.name.clone(),
                    kind: EncodedKind::Continuous,
                }),
                ColumnKind::Categorical => {
                    let cat = cats.next().expect("one entry per categorical");
                    out.extend(cat.levels.iter().map(|level| EncodedColumn {
                        name: format!("{}={}", col.name, level),
                        kind: EncodedKind::OneHot,
                    }));
                }
            }
        }
        out
    }

    pub fn transform(&self, frame: &FeatureFrame) -> Result<Array2<f64>> {
        if frame.columns != self.input {
            return Err(Error::Precondition(
                "frame columns differ from the columns the encoder was fitted on".into(),
            ));
        }
        let width = self.output_columns().len();
        let mut out = Array2::zeros((frame.len(), width));
        for (i, row) in frame.values.rows().into_iter().enumerate() {
            let mut k = 0;
            let mut cats = self.categorical.iter();
            for (col, &v) in self.input.iter().zip(row.iter()) {
                match col.kind {
                    ColumnKind::Continuous => {
                        out[[i, k]] = v;
                        k += 1;
                    }
                    ColumnKind::Categorical => {
                        let cat = cats.next().expect("one entry per categorical");
                        if v.fract() == 0.0 {
                            if let Ok(pos) = cat.levels.binary_search(&(v as i64)) {
                                out[[i, k + pos]] = 1.0;
                            }
                        }
                        k += cat.levels.len();
                    }
                }
            }
        }
        Ok(out)
    }
}

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::dataset::RawDataset;
use super::features::{
    derive_utilization_features, select_feature_set, EncodedColumn, FeatureSetKind, OneHotEncoder,
};
use super::schema;
use super::split::{stratified_split, SplitFractions};
use super::standardize::{fit_standardizer, Standardizer};
use crate::error::{Error, Result};
use crate::io::{self, fmt_f64};

pub const TRAIN_FILE: &str = "train.csv";
pub const VALIDATION_FILE: &str = "validation.csv";
pub const TEST_FILE: &str = "test.csv";
pub const SIDECAR_FILE: &str = "preprocessing.json";

/// Model-ready rows of one split: encoded, standardized features.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSplit {
    /// Zero-based row positions in the source file.
    pub row_ids: Vec<usize>,
    pub features: Array2<f64>,
    pub labels: Vec<u8>,
}

impl PreparedSplit {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positive_fraction(&self) -> f64 {
        self.labels.iter().filter(|&&y| y == 1).count() as f64 / self.len() as f64
    }
}

/// Everything needed to reproduce the preprocessing of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessingSidecar {
    pub feature_set: FeatureSetKind,
    pub seed: u64,
    pub fractions: SplitFractions,
    pub columns: Vec<EncodedColumn>,
    pub encoder: OneHotEncoder,
    pub standardizer: Standardizer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedData {
    pub sidecar: PreprocessingSidecar,
    pub train: PreparedSplit,
    pub validation: PreparedSplit,
    pub test: PreparedSplit,
}

/// Derives ratios (if absent), selects `kind`, splits, one-hot encodes and
/// standardizes with statistics from the training rows only.
pub fn prepare(
    raw: &RawDataset,
    kind: FeatureSetKind,
    fractions: SplitFractions,
    seed: u64,
) -> Result<PreparedData> {
    let derived;
    let ds = if raw.column_index(schema::UTILIZATION[0]).is_some() {
        raw
    } else {
        derived = derive_utilization_features(raw)?;
        &derived
    };
    let frame = select_feature_set(ds, kind)?;
    let split = stratified_split(frame.len(), &frame.labels, fractions, seed)?;

    let train_frame = frame.subset(&split.train);
    let encoder = OneHotEncoder::fit(&train_frame)?;
    let columns = encoder.output_columns();
    let train_x = encoder.transform(&train_frame)?;
    let standardizer = fit_standardizer(&train_x, &columns)?;

    let build = |indices: &[usize], x: Array2<f64>| -> Result<PreparedSplit> {
        Ok(PreparedSplit {
            row_ids: indices.to_vec(),
            features: standardizer.apply(&x)?,
            labels: indices.iter().map(|&i| frame.labels[i]).collect(),
        })
    };
    let train = build(&split.train, train_x.clone())?;
    let validation = build(
        &split.validation,
        encoder.transform(&frame.subset(&split.validation))?,
    )?;
    let test = build(&split.test, encoder.transform(&frame.subset(&split.test))?)?;

    Ok(PreparedData {
        sidecar: PreprocessingSidecar {
            feature_set: kind,
            seed,
            fractions,
            columns,
            encoder,
            standardizer,
        },
        train,
        validation,
        test,
    })
}

impl PreparedData {
    pub fn splits(&self) -> [(&'static str, &PreparedSplit); 3] {
        [
            ("train", &self.train),
            ("validation", &self.validation),
            ("test", &self.test),
        ]
    }

    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (file, split) in [
            (TRAIN_FILE, &self.train),
            (VALIDATION_FILE, &self.validation),
            (TEST_FILE, &self.test),
        ] {
            write_split(dir.join(file), &self.sidecar.columns, split)?;
        }
        io::write_json(dir.join(SIDECAR_FILE), &self.sidecar)
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let sidecar: PreprocessingSidecar = io::read_json(dir.join(SIDECAR_FILE))?;
        let read = |file: &str| read_split(dir.join(file), &sidecar.columns);
        Ok(Self {
            train: read(TRAIN_FILE)?,
            validation: read(VALIDATION_FILE)?,
            test: read(TEST_FILE)?,
            sidecar,
        })
    }
}

fn write_split(
    path: impl AsRef<Path>,
    columns: &[EncodedColumn],
    split: &PreparedSplit,
) -> Result<()> {
    let mut w = io::csv_writer(path)?;
    let mut header = vec!["row_id".to_string()];
    header.extend(columns.iter().map(|c| c.name.clone()));
    header.push("label".into());
    w.write_record(&header)?;
    for (i, row) in split.features.rows().into_iter().enumerate() {
        let mut rec = Vec::with_capacity(row.len() + 2);
        rec.push(split.row_ids[i].to_string());
        rec.extend(row.iter().map(|&v| fmt_f64(v)));
        rec.push(split.labels[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

fn read_split(path: impl AsRef<Path>, columns: &[EncodedColumn]) -> Result<PreparedSplit> {
    let mut r = io::csv_reader(path)?;
    let header = r.headers()?.clone();
    let width = columns.len();
    if header.len() != width + 2
        || header
            .iter()
            .skip(1)
            .take(width)
            .ne(columns.iter().map(|c| c.name.as_str()))
    {
        return Err(Error::Schema(
            "split file columns do not match the preprocessing sidecar".into(),
        ));
    }
    let mut row_ids = Vec::new();
    let mut flat = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        if rec.len() != width + 2 {
            return Err(Error::Row {
                row,
                message: format!("expected {} cells, found {}", width + 2, rec.len()),
            });
        }
        row_ids.push(io::parse_cell(&rec[0], row, "row_id")?);
        for (j, cell) in rec.iter().enumerate().skip(1).take(width) {
            flat.push(io::parse_cell::<f64>(cell, row, &header[j])?);
        }
        labels.push(io::parse_cell(&rec[width + 1], row, "label")?);
    }
    let features = Array2::from_shape_vec((labels.len(), width), flat)
        .map_err(|e| Error::Schema(e.to_string()))?;
    Ok(PreparedSplit {
        row_ids,
        features,
        labels,
    })
}

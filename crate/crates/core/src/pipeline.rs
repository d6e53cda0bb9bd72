//! End-to-end steps shared by the command-line tool and the acceptance
//! checks: training on prepared splits, per-split reports, and the
//! calibration comparison.

use serde::{Deserialize, Serialize};

use crate::calibration::{CalibrationConfig, CalibrationMethod, Calibrator};
use crate::data::{PreparedData, PreparedSplit};
use crate::error::Result;
use crate::metrics::{bce, brier, full_report, mdr, MetricsReport};
use crate::models::{balanced_bce_loss, train, ModelKind, SplitView, TrainConfig, TrainedModel};

fn view(split: &PreparedSplit) -> Result<SplitView<'_>> {
    SplitView::new(split.features.view(), &split.labels)
}

pub fn train_on(
    kind: ModelKind,
    data: &PreparedData,
    config: &TrainConfig,
) -> Result<TrainedModel> {
    train(kind, view(&data.train)?, view(&data.validation)?, config)
}

/// Model probabilities for each split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPredictions {
    pub train: Vec<f64>,
    pub validation: Vec<f64>,
    pub test: Vec<f64>,
}

pub fn predict_splits(model: &TrainedModel, data: &PreparedData) -> Result<SplitPredictions> {
    Ok(SplitPredictions {
        train: model.predict(data.train.features.view())?,
        validation: model.predict(data.validation.features.view())?,
        test: model.predict(data.test.features.view())?,
    })
}

/// Discrimination metrics of one split at the model's threshold, plus the
/// class-weighted training loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub split: String,
    pub loss: f64,
    pub metrics: MetricsReport,
}

pub fn performance_reports(
    model: &TrainedModel,
    data: &PreparedData,
    predictions: &SplitPredictions,
    bins: usize,
) -> Result<Vec<PerformanceReport>> {
    let probs = [
        &predictions.train,
        &predictions.validation,
        &predictions.test,
    ];
    data.splits()
        .into_iter()
        .zip(probs)
        .map(|((name, split), p)| {
            Ok(PerformanceReport {
                split: name.to_string(),
                loss: balanced_bce_loss(&split.labels, p, model.alpha)?,
                metrics: full_report(&split.labels, p, model.threshold, bins)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationScores {
    pub mdr_percent: f64,
    pub bce: f64,
    pub brier: f64,
}

impl CalibrationScores {
    pub fn compute(labels: &[u8], probs: &[f64]) -> Result<Self> {
        Ok(Self {
            mdr_percent: mdr(probs)?,
            bce: bce(labels, probs)?,
            brier: brier(labels, probs)?,
        })
    }
}

/// One row of the calibration comparison. `method` is `None` for the
/// uncalibrated baseline; a failed fit leaves scores empty and sets `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOutcome {
    pub method: Option<CalibrationMethod>,
    pub calibrator: Option<Calibrator>,
    pub validation: Option<CalibrationScores>,
    pub test: Option<CalibrationScores>,
    pub validation_probs: Vec<f64>,
    pub test_probs: Vec<f64>,
    pub error: Option<String>,
}

impl CalibrationOutcome {
    pub fn label(&self) -> String {
        self.method
            .map_or_else(|| "Uncalibrated".to_string(), |m| m.label())
    }
}

/// Fits every method on the validation probabilities and scores it on the
/// validation and test splits. The first row is the uncalibrated baseline.
pub fn compare_calibrators(
    validation: (&[f64], &[u8]),
    test: (&[f64], &[u8]),
    plan: &[CalibrationMethod],
    config: &CalibrationConfig,
) -> Result<Vec<CalibrationOutcome>> {
    let (vp, vy) = validation;
    let (tp, ty) = test;
    let mut rows = vec![CalibrationOutcome {
        method: None,
        calibrator: None,
        validation: Some(CalibrationScores::compute(vy, vp)?),
        test: Some(CalibrationScores::compute(ty, tp)?),
        validation_probs: vp.to_vec(),
        test_probs: tp.to_vec(),
        error: None,
    }];
    for &method in plan {
        let fitted = method.fit(vp, vy, config).and_then(|c| {
            let v = c.apply(vp)?;
            let t = c.apply(tp)?;
            Ok((c, v, t))
        });
        let row = match fitted {
            Ok((c, v, t)) => CalibrationOutcome {
                method: Some(method),
                calibrator: Some(c),
                validation: Some(CalibrationScores::compute(vy, &v)?),
                test: Some(CalibrationScores::compute(ty, &t)?),
                validation_probs: v,
                test_probs: t,
                error: None,
            },
            Err(e) => {
                log::warn!("{method}: {e}");
                CalibrationOutcome {
                    method: Some(method),
                    calibrator: None,
                    validation: None,
                    test: None,
                    validation_probs: Vec::new(),
                    test_probs: Vec::new(),
                    error: Some(e.to_string()),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

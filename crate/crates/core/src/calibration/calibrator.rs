use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::maps::Family;
use super::platt::{platt_fit, PlattConfig};
use super::sure::{sure_fit, SureSolverConfig};
use crate::error::{Error, Result};
use crate::io::{self, fmt_f64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibFunctionKind {
    PlattSigmoid,
    SureSigmoid,
    SureKumaraswamy,
}

impl CalibFunctionKind {
    pub const ALL: [CalibFunctionKind; 3] = [
        CalibFunctionKind::PlattSigmoid,
        CalibFunctionKind::SureSigmoid,
        CalibFunctionKind::SureKumaraswamy,
    ];

    pub fn family(self) -> Family {
        match self {
            CalibFunctionKind::PlattSigmoid | CalibFunctionKind::SureSigmoid => Family::Sigmoid,
            CalibFunctionKind::SureKumaraswamy => Family::Kumaraswamy,
        }
    }

    pub fn is_sure(self) -> bool {
        self != CalibFunctionKind::PlattSigmoid
    }

    /// Row label used in console tables.
    pub fn label(self) -> &'static str {
        match self {
            CalibFunctionKind::PlattSigmoid => "Platt",
            CalibFunctionKind::SureSigmoid => "SURE (sigmoid)",
            CalibFunctionKind::SureKumaraswamy => "SURE (Kumaraswamy)",
        }
    }
}

impl fmt::Display for CalibFunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CalibFunctionKind::PlattSigmoid => "platt",
            CalibFunctionKind::SureSigmoid => "sure-sigmoid",
            CalibFunctionKind::SureKumaraswamy => "sure-kumaraswamy",
        })
    }
}

impl FromStr for CalibFunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "platt" | "platt-sigmoid" => Ok(CalibFunctionKind::PlattSigmoid),
            "sure-sigmoid" | "sure-sig" => Ok(CalibFunctionKind::SureSigmoid),
            "sure-kumaraswamy" | "sure-kum" => Ok(CalibFunctionKind::SureKumaraswamy),
            other => Err(Error::Parameter(format!(
                "unknown calibrator {other:?} (expected platt, sure-sigmoid or sure-kumaraswamy)"
            ))),
        }
    }
}

/// Fit-time diagnostics. SURE-only fields are `None` for Platt scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub iterations: usize,
    pub gradient_norm: f64,
    /// `|C(theta)|`: gap between mean calibrated probability and label mean
    /// on the fitting data.
    pub constraint: f64,
    pub sure: Option<f64>,
    pub mu: Option<f64>,
    pub rounds: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratorParams {
    pub kind: CalibFunctionKind,
    pub theta1: f64,
    pub theta2: f64,
    /// Estimated noise variance, SURE kinds only.
    pub sigma2: Option<f64>,
    pub diagnostics: Option<FitDiagnostics>,
}

impl CalibratorParams {
    pub fn theta(&self) -> [f64; 2] {
        [self.theta1, self.theta2]
    }

    pub fn validate(&self) -> Result<()> {
        self.kind.family().check_theta(self.theta())?;
        match (self.kind.is_sure(), self.sigma2) {
            (true, Some(s)) if s.is_finite() && s >= 0.0 => Ok(()),
            (true, _) => Err(Error::Parameter(format!(
                "{} calibrator needs a nonnegative sigma2",
                self.kind
            ))),
            (false, None) => Ok(()),
            (false, Some(_)) => Err(Error::Parameter(
                "Platt calibrator carries no sigma2".into(),
            )),
        }
    }

    pub fn apply(&self, probs: &[f64]) -> Result<Vec<f64>> {
        apply_calibrator(self, probs)
    }
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| p.is_nan()) {
        return Err(Error::Parameter("probabilities contain NaN".into()));
    }
    Ok(())
}

/// `G_theta` of the calibrator's family, elementwise. Inputs are clamped to
/// `[0, 1]` first.
pub fn apply_calibrator(params: &CalibratorParams, probs: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    check_probs(probs)?;
    let clamped: Vec<f64> = probs.iter().map(|p| p.clamp(0.0, 1.0)).collect();
    params.kind.family().apply(params.theta(), &clamped)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationConfig {
    pub platt: PlattConfig,
    pub sure: SureSolverConfig,
}

pub fn fit_calibrator(
    kind: CalibFunctionKind,
    probs: &[f64],
    labels: &[u8],
    config: &CalibrationConfig,
) -> Result<CalibratorParams> {
    check_probs(probs)?;
    let params = match kind {
        CalibFunctionKind::PlattSigmoid => {
            let fit = platt_fit(probs, labels, &config.platt)?;
            let calibrated = kind.family().apply(fit.theta, probs)?;
            let mean_g = calibrated.iter().sum::<f64>() / probs.len() as f64;
            let ybar = labels.iter().map(|&y| f64::from(y)).sum::<f64>() / labels.len() as f64;
            CalibratorParams {
                kind,
                theta1: fit.theta[0],
                theta2: fit.theta[1],
                sigma2: None,
                diagnostics: Some(FitDiagnostics {
                    iterations: fit.iterations,
                    gradient_norm: fit.gradient_norm,
                    constraint: (mean_g - ybar).abs(),
                    sure: None,
                    mu: None,
                    rounds: None,
                }),
            }
        }
        CalibFunctionKind::SureSigmoid | CalibFunctionKind::SureKumaraswamy => {
            let fit = sure_fit(probs, labels, kind.family(), &config.sure)?;
            CalibratorParams {
                kind,
                theta1: fit.theta[0],
                theta2: fit.theta[1],
                sigma2: Some(fit.sigma2),
                diagnostics: Some(FitDiagnostics {
                    iterations: fit.iterations,
                    gradient_norm: fit.gradient_norm,
                    constraint: fit.constraint.abs(),
                    sure: Some(fit.sure),
                    mu: Some(fit.mu),
                    rounds: Some(fit.rounds),
                }),
            }
        }
    };
    log::info!("{kind}: theta ({:.6}, {:.6})", params.theta1, params.theta2);
    Ok(params)
}

/// Two calibrators applied in sequence; `second` was fitted on the outputs
/// of `first`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackedCalibrator {
    pub first: CalibratorParams,
    pub second: CalibratorParams,
}

impl StackedCalibrator {
    pub fn apply(&self, probs: &[f64]) -> Result<Vec<f64>> {
        self.second.apply(&self.first.apply(probs)?)
    }
}

/// Fits `first` on the raw probabilities and `second` on `first`'s output.
/// Exactly one of the two must be Platt scaling.
pub fn stack_fit(
    first: CalibFunctionKind,
    second: CalibFunctionKind,
    probs: &[f64],
    labels: &[u8],
    config: &CalibrationConfig,
) -> Result<StackedCalibrator> {
    if first.is_sure() == second.is_sure() {
        return Err(Error::Parameter(format!(
            "a stack pairs Platt scaling with a SURE calibrator, got {first} then {second}"
        )));
    }
    let first = fit_calibrator(first, probs, labels, config)?;
    let intermediate = first.apply(probs)?;
    let second = fit_calibrator(second, &intermediate, labels, config)?;
    Ok(StackedCalibrator { first, second })
}

/// A single calibration function or a two-stage stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CalibrationMethod {
    Single(CalibFunctionKind),
    Stack(CalibFunctionKind, CalibFunctionKind),
}

impl CalibrationMethod {
    /// The three single calibrators followed by the four stacks, in table order.
    pub const ALL: [CalibrationMethod; 7] = {
        use CalibFunctionKind::*;
        [
            CalibrationMethod::Single(PlattSigmoid),
            CalibrationMethod::Single(SureSigmoid),
            CalibrationMethod::Single(SureKumaraswamy),
            CalibrationMethod::Stack(PlattSigmoid, SureSigmoid),
            CalibrationMethod::Stack(SureSigmoid, PlattSigmoid),
            CalibrationMethod::Stack(PlattSigmoid, SureKumaraswamy),
            CalibrationMethod::Stack(SureKumaraswamy, PlattSigmoid),
        ]
    };

    pub fn label(self) -> String {
        match self {
            CalibrationMethod::Single(k) => k.label().to_string(),
            CalibrationMethod::Stack(a, b) => format!("{} + {}", a.label(), b.label()),
        }
    }

    pub fn fit(
        self,
        probs: &[f64],
        labels: &[u8],
        config: &CalibrationConfig,
    ) -> Result<Calibrator> {
        match self {
            CalibrationMethod::Single(k) => Ok(Calibrator::Single(fit_calibrator(
                k, probs, labels, config,
            )?)),
            CalibrationMethod::Stack(a, b) => {
                Ok(Calibrator::Stacked(stack_fit(a, b, probs, labels, config)?))
            }
        }
    }
}

impl fmt::Display for CalibrationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalibrationMethod::Single(k) => write!(f, "{k}"),
            CalibrationMethod::Stack(a, b) => write!(f, "{a}+{b}"),
        }
    }
}

impl FromStr for CalibrationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('+') {
            None => Ok(CalibrationMethod::Single(s.parse()?)),
            Some((a, b)) => {
                let (a, b): (CalibFunctionKind, CalibFunctionKind) = (a.parse()?, b.parse()?);
                if a.is_sure() == b.is_sure() {
                    return Err(Error::Parameter(format!(
                        "a stack pairs Platt scaling with a SURE calibrator, got {s:?}"
                    )));
                }
                Ok(CalibrationMethod::Stack(a, b))
            }
        }
    }
}

/// Fitted calibrator of either shape, as persisted to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Calibrator {
    Single(CalibratorParams),
    Stacked(StackedCalibrator),
}

impl Calibrator {
    pub fn method(&self) -> CalibrationMethod {
        match self {
            Calibrator::Single(p) => CalibrationMethod::Single(p.kind),
            Calibrator::Stacked(s) => CalibrationMethod::Stack(s.first.kind, s.second.kind),
        }
    }

    pub fn apply(&self, probs: &[f64]) -> Result<Vec<f64>> {
        match self {
            Calibrator::Single(p) => p.apply(probs),
            Calibrator::Stacked(s) => s.apply(probs),
        }
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        io::write_json(path, self)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let c: Calibrator = io::read_json(path)?;
        match &c {
            Calibrator::Single(p) => p.validate()?,
            Calibrator::Stacked(s) => {
                s.first.validate()?;
                s.second.validate()?;
            }
        }
        Ok(c)
    }
}

/// Writes `row_id,raw_prob,calibrated_prob,label`.
pub fn write_calibrated_csv(
    path: impl AsRef<Path>,
    row_ids: &[usize],
    raw: &[f64],
    calibrated: &[f64],
    labels: &[u8],
) -> Result<()> {
    Error::check_len(row_ids.len(), raw.len())?;
    Error::check_len(row_ids.len(), calibrated.len())?;
    Error::check_len(row_ids.len(), labels.len())?;
    let mut w = io::csv_writer(path)?;
    w.write_record(["row_id", "raw_prob", "calibrated_prob", "label"])?;
    for i in 0..row_ids.len() {
        w.write_record([
            row_ids[i].to_string(),
            fmt_f64(raw[i]),
            fmt_f64(calibrated[i]),
            labels[i].to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Contents of a calibrated-probability CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CalibratedRows {
    pub row_ids: Vec<usize>,
    pub raw: Vec<f64>,
    pub calibrated: Vec<f64>,
    pub labels: Vec<u8>,
}

pub fn read_calibrated_csv(path: impl AsRef<Path>) -> Result<CalibratedRows> {
    const COLUMNS: [&str; 4] = ["row_id", "raw_prob", "calibrated_prob", "label"];
    let mut r = io::csv_reader(path)?;
    let header = r.headers()?.clone();
    let idx: Vec<usize> = COLUMNS
        .iter()
        .map(|c| {
            header
                .iter()
                .position(|h| h.trim() == *c)
                .ok_or_else(|| Error::Schema(format!("missing column {c:?}")))
        })
        .collect::<Result<_>>()?;
    let mut out = CalibratedRows::default();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = k + 1;
        let cell = |j: usize| rec.get(idx[j]).unwrap_or("");
        out.row_ids.push(io::parse_cell(cell(0), row, COLUMNS[0])?);
        out.raw.push(io::parse_cell(cell(1), row, COLUMNS[1])?);
        out.calibrated
            .push(io::parse_cell(cell(2), row, COLUMNS[2])?);
        let y: u8 = io::parse_cell(cell(3), row, COLUMNS[3])?;
        if y > 1 {
            return Err(Error::Row {
                row,
                message: format!("label must be 0 or 1, got {y}"),
            });
        }
        out.labels.push(y);
    }
    Ok(out)
}

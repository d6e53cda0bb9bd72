use std::fs;
use std::path::{Path, PathBuf};

use credit_calib::calibration::{read_calibrated_csv, write_calibrated_csv, CalibrationMethod};
use credit_calib::data::{load_credit_csv, prepare, PreparedData, SIDECAR_FILE};
use credit_calib::metrics::{ece, full_report, mce, reliability_bins, BinAccuracy};
use credit_calib::models::TrainedModel;
use credit_calib::pipeline::{compare_calibrators, performance_reports, predict_splits, train_on};
use credit_calib::{io, Error};
use serde::Serialize;

use crate::cli::{ProbColumn, ProbsInput};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::tables;

pub const MODEL_FILE: &str = "model.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const SUMMARY_FILE: &str = "summary.json";

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

fn load_prepared(cfg: &RunConfig) -> Result<PreparedData, CliError> {
    let dir = cfg.prepared_dir();
    if !dir.join(SIDECAR_FILE).is_file() {
        return Err(CliError::Usage(format!(
            "no prepared splits in {} (run `prepare` with the same --out and --features first)",
            dir.display()
        )));
    }
    let data = PreparedData::read_dir(&dir)?;
    if data.sidecar.feature_set != cfg.features {
        return Err(CliError::Usage(format!(
            "{} holds {} features, not {}",
            dir.display(),
            data.sidecar.feature_set,
            cfg.features
        )));
    }
    Ok(data)
}

fn load_model(cfg: &RunConfig, data: &PreparedData) -> Result<TrainedModel, CliError> {
    let path = cfg.model_dir().join(MODEL_FILE);
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "no trained model at {} (run `train` first)",
            path.display()
        )));
    }
    let model = TrainedModel::read_json(&path)?;
    if model.kind != cfg.model {
        return Err(CliError::Usage(format!(
            "{} holds a {} model",
            path.display(),
            model.kind
        )));
    }
    if model.network.input_dim() != data.train.features.ncols() {
        return Err(Error::Dimension {
            expected: data.train.features.ncols(),
            actual: model.network.input_dim(),
        }
        .into());
    }
    Ok(model)
}

pub fn prepare_cmd(cfg: &mut RunConfig, data: Option<PathBuf>) -> Result<(), CliError> {
    if data.is_some() {
        cfg.dataset = data;
    }
    let path = cfg.dataset_path()?;
    cfg.dataset = Some(path.clone());
    let raw = load_credit_csv(&path)?;
    let prepared = prepare(&raw, cfg.features, cfg.fractions, cfg.seed)?;

    let dir = cfg.prepared_dir();
    create_dir(&dir)?;
    prepared.write_dir(&dir)?;
    cfg.persist(&dir)?;

    println!(
        "{} rows, {:.2}% positive; {} features ({} columns after encoding)",
        raw.len(),
        100.0 * raw.positive_fraction(),
        cfg.features,
        prepared.sidecar.columns.len()
    );
    for (name, split) in prepared.splits() {
        println!(
            "  {name:<10} {:>6} rows  {:>6.2}% positive",
            split.len(),
            100.0 * split.positive_fraction()
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

pub fn train_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let data = load_prepared(cfg)?;
    let model = train_on(cfg.model, &data, &cfg.train)?;
    let preds = predict_splits(&model, &data)?;
    let reports = performance_reports(&model, &data, &preds, cfg.bins)?;

    let dir = cfg.model_dir();
    create_dir(&dir)?;
    model.write_json(dir.join(MODEL_FILE))?;
    model.write_history_csv(dir.join(HISTORY_FILE))?;
    for r in &reports {
        io::write_json(dir.join(format!("report_{}.json", r.split)), r)?;
    }
    cfg.persist(&dir)?;

    println!(
        "{} on {} features: best epoch {} of {}, threshold {:.4}",
        cfg.model,
        cfg.features,
        model.best_epoch,
        model.history.len(),
        model.threshold
    );
    print!("{}", tables::performance_table("Performance", &reports));
    println!("wrote {}", dir.display());
    Ok(())
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    method: String,
    validation: Option<credit_calib::pipeline::CalibrationScores>,
    test: Option<credit_calib::pipeline::CalibrationScores>,
    error: Option<&'a str>,
}

fn file_stem(method: Option<CalibrationMethod>) -> String {
    method.map_or_else(
        || "uncalibrated".to_string(),
        |m| m.to_string().replace('+', "_then_"),
    )
}

pub fn calibrate_cmd(cfg: &mut RunConfig, plan: Option<String>) -> Result<(), CliError> {
    if let Some(p) = plan {
        cfg.plan = match p.trim() {
            "" | "none" => Vec::new(),
            list => list.split(',').map(|s| s.trim().to_string()).collect(),
        };
    }
    let methods = cfg.plan()?;
    let data = load_prepared(cfg)?;
    let model = load_model(cfg, &data)?;
    let val_probs = model.predict(data.validation.features.view())?;
    let test_probs = model.predict(data.test.features.view())?;

    let rows = compare_calibrators(
        (&val_probs, &data.validation.labels),
        (&test_probs, &data.test.labels),
        &methods,
        &cfg.calibration,
    )?;

    let dir = cfg.calibration_dir();
    create_dir(&dir)?;
    for row in rows.iter().filter(|r| r.error.is_none()) {
        let stem = file_stem(row.method);
        if let Some(c) = &row.calibrator {
            c.write_json(dir.join(format!("{stem}.json")))?;
        }
        for (name, split, raw, cal) in [
            (
                "validation",
                &data.validation,
                &val_probs,
                &row.validation_probs,
            ),
            ("test", &data.test, &test_probs, &row.test_probs),
        ] {
            write_calibrated_csv(
                dir.join(format!("{stem}_{name}.csv")),
                &split.row_ids,
                raw,
                cal,
                &split.labels,
            )?;
        }
    }
    let summary: Vec<SummaryRow> = rows
        .iter()
        .map(|r| SummaryRow {
            method: r
                .method
                .map_or_else(|| "uncalibrated".into(), |m| m.to_string()),
            validation: r.validation,
            test: r.test,
            error: r.error.as_deref(),
        })
        .collect();
    io::write_json(dir.join(SUMMARY_FILE), &summary)?;
    cfg.persist(&dir)?;

    let title = format!("Calibration of {} ({} features)", cfg.model, cfg.features);
    print!("{}", tables::calibration_table(&title, &rows));
    println!("wrote {}", dir.display());
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        return Err(CliError::PartialFailure(failed));
    }
    Ok(())
}

fn read_probs(input: &ProbsInput) -> Result<(Vec<u8>, Vec<f64>), CliError> {
    let rows = read_calibrated_csv(&input.input)?;
    if rows.labels.is_empty() {
        return Err(Error::Precondition(format!("{} has no rows", input.input.display())).into());
    }
    let probs = match input.column {
        ProbColumn::Calibrated => rows.calibrated,
        ProbColumn::Raw => rows.raw,
    };
    Ok((rows.labels, probs))
}

fn check_tau(tau: Option<f64>) -> Result<(), CliError> {
    match tau {
        Some(t) if !(0.0..=1.0).contains(&t) => Err(CliError::Usage(format!(
            "--tau must lie in [0, 1], got {t}"
        ))),
        _ => Ok(()),
    }
}

pub fn reliability_cmd(cfg: &RunConfig, input: &ProbsInput) -> Result<(), CliError> {
    check_tau(input.tau)?;
    let (labels, probs) = read_probs(input)?;
    let accuracy = input
        .tau
        .map_or(BinAccuracy::EventRate, BinAccuracy::Thresholded);
    let bins = reliability_bins(&labels, &probs, accuracy, cfg.bins)?;
    let (e, m) = (ece(&bins)?, mce(&bins)?);

    let output = match &input.output {
        Some(p) => p.clone(),
        None => {
            create_dir(&cfg.out)?;
            cfg.out.join(format!("reliability_m{}.csv", cfg.bins))
        }
    };
    bins.write_csv(&output)?;

    println!("{} rows in {} bins", bins.total(), cfg.bins);
    println!("ECE {e:.4}");
    println!("MCE {m:.4}");
    println!("wrote {}", output.display());
    Ok(())
}

pub fn report_cmd(cfg: &RunConfig, input: &ProbsInput) -> Result<(), CliError> {
    check_tau(input.tau)?;
    let (labels, probs) = read_probs(input)?;
    let tau = input.tau.unwrap_or(0.5);
    let report = full_report(&labels, &probs, tau, cfg.bins)?;
    let output = match &input.output {
        Some(p) => p.clone(),
        None => {
            create_dir(&cfg.out)?;
            cfg.out.join("report.json")
        }
    };
    report.write_json(&output)?;

    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
    println!("N {}  tau {tau}", report.n);
    println!(
        "F1 {:.4}  recall {:.4}  precision {:.4}",
        report.f1, report.recall, report.precision
    );
    println!(
        "AUC-ROC {}  AUC-PR {}",
        opt(report.auc_roc),
        opt(report.auc_pr)
    );
    println!(
        "MDR {:.2}  BCE {:.4}  BS {:.4}  ECE {:.4}  MCE {:.4}",
        report.mdr_percent, report.bce, report.brier, report.ece, report.mce
    );
    println!("wrote {}", output.display());
    Ok(())
}

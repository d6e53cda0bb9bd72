use std::fmt::Write;

use credit_calib::pipeline::{CalibrationOutcome, CalibrationScores, PerformanceReport};

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"))
}

/// Metric rows against training, validation and testing columns.
pub fn performance_table(title: &str, reports: &[PerformanceReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = write!(s, "{:<12}", "");
    for r in reports {
        let _ = write!(s, "{:>12}", column_name(&r.split));
    }
    s.push('\n');
    type Getter = fn(&PerformanceReport) -> Option<f64>;
    let rows: [(&str, Getter); 6] = [
        ("F1", |r| Some(r.metrics.f1)),
        ("Recall", |r| Some(r.metrics.recall)),
        ("Precision", |r| Some(r.metrics.precision)),
        ("AUC-ROC", |r| r.metrics.auc_roc),
        ("AUC-PR", |r| r.metrics.auc_pr),
        ("Loss", |r| Some(r.loss)),
    ];
    for (name, get) in rows {
        let _ = write!(s, "{name:<12}");
        for r in reports {
            let _ = write!(s, "{:>12}", opt(get(r)));
        }
        s.push('\n');
    }
    s
}

fn column_name(split: &str) -> &str {
    match split {
        "train" => "Training",
        "validation" => "Validation",
        "test" => "Testing",
        other => other,
    }
}

fn scores(s: Option<CalibrationScores>) -> String {
    match s {
        Some(s) => format!("{:>8.2}{:>8.3}{:>8.3}", s.mdr_percent, s.bce, s.brier),
        None => format!("{:>8}{:>8}{:>8}", "-", "-", "-"),
    }
}

/// MDR, BCE and Brier score per method on validation and test.
pub fn calibration_table(title: &str, rows: &[CalibrationOutcome]) -> String {
    let width = rows
        .iter()
        .map(|r| r.label().len())
        .max()
        .unwrap_or(0)
        .max(12)
        + 2;
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(s, "{:<width$}{:^24}  {:^24}", "", "Validation", "Testing");
    let head = format!("{:>8}{:>8}{:>8}", "MDR", "BCE", "BS");
    let _ = writeln!(s, "{:<width$}{head}  {head}", "Method");
    for r in rows {
        let _ = write!(
            s,
            "{:<width$}{}  {}",
            r.label(),
            scores(r.validation),
            scores(r.test)
        );
        if let Some(e) = &r.error {
            let _ = write!(s, "  failed: {e}");
        }
        s.push('\n');
    }
    s
}

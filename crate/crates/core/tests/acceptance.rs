//! Acceptance suite. Prints one `PASS`, `FAIL` or `BLOCKED` line per
//! criterion and exits non-zero on any failure.
//!
//! Criteria that need the real credit data run when `CREDIT_CSV` points at
//! the converted CSV; otherwise they report `BLOCKED` and a synthetic
//! surrogate runs in their place. Set `ACCEPTANCE_REQUIRE_DATASET=1` to turn
//! `BLOCKED` into a failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use credit_calib::calibration::{
    penalty_gradient, penalty_value, sure_fit, sure_loss, CalibFunctionKind, CalibrationConfig,
    CalibrationMethod, Family, SureSolverConfig,
};
use credit_calib::data::synthetic::synthetic_credit;
use credit_calib::data::{
    load_credit_csv, prepare, FeatureSetKind, PreparedData, RawDataset, SplitFractions,
};
use credit_calib::metrics::{auc_pr, auc_roc, full_report};
use credit_calib::models::{ModelKind, TrainConfig, TrainedModel};
use credit_calib::pipeline::{compare_calibrators, predict_splits, train_on, CalibrationOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SPLIT_SEED: u64 = 42;
const NN_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const EMPIRICAL_DEFAULT_RATE: f64 = 22.13;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Blocked,
}

struct Report {
    lines: Vec<(String, Status, String)>,
}

impl Report {
    fn record(&mut self, id: &str, status: Status, detail: String) {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Blocked => "BLOCKED",
        };
        println!("{tag:<8} {id:<28} {detail}");
        self.lines.push((id.to_string(), status, detail));
    }

    fn check(&mut self, id: &str, checks: &[Check]) {
        let ok = checks.iter().all(|c| c.ok);
        let detail = checks
            .iter()
            .map(|c| c.text.as_str())
            .collect::<Vec<_>>()
            .join("; ");
        self.record(id, if ok { Status::Pass } else { Status::Fail }, detail);
    }
}

struct Check {
    ok: bool,
    text: String,
}

fn within(name: &str, value: f64, target: f64, tol: f64) -> Check {
    let ok = (value - target).abs() <= tol;
    Check {
        ok,
        text: format!(
            "{name} {value:.4} (target {target:.4} ± {tol}){}",
            if ok { "" } else { " ✗" }
        ),
    }
}

fn at_most(name: &str, value: f64, bound: f64) -> Check {
    let ok = value <= bound;
    Check {
        ok,
        text: format!(
            "{name} {value:.4e} ≤ {bound:.1e}{}",
            if ok { "" } else { " ✗" }
        ),
    }
}

fn at_least(name: &str, value: f64, bound: f64) -> Check {
    let ok = value >= bound;
    Check {
        ok,
        text: format!("{name} {value:.4} ≥ {bound}{}", if ok { "" } else { " ✗" }),
    }
}

fn failed(name: &str, err: impl std::fmt::Display) -> Check {
    Check {
        ok: false,
        text: format!("{name}: {err} ✗"),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

// ----------------------------------------------------------------------------
// Dataset-backed experiments

struct Trained {
    model: TrainedModel,
    data: PreparedData,
}

impl Trained {
    fn fit(raw: &RawDataset, features: FeatureSetKind, kind: ModelKind, seed: u64) -> Self {
        let data = prepare(raw, features, SplitFractions::default(), SPLIT_SEED).expect("prepare");
        let cfg = TrainConfig {
            seed,
            ..TrainConfig::default()
        };
        let model = train_on(kind, &data, &cfg).expect("train");
        Self { model, data }
    }

    fn test_metrics(&self) -> (f64, Option<f64>, Option<f64>) {
        let preds = predict_splits(&self.model, &self.data).expect("predict");
        let r = full_report(
            &self.data.test.labels,
            &preds.test,
            self.model.threshold,
            10,
        )
        .expect("report");
        (r.f1, r.auc_roc, r.auc_pr)
    }

    fn calibrate(&self, plan: &[CalibrationMethod]) -> Vec<CalibrationOutcome> {
        let preds = predict_splits(&self.model, &self.data).expect("predict");
        compare_calibrators(
            (&preds.validation, &self.data.validation.labels),
            (&preds.test, &self.data.test.labels),
            plan,
            &CalibrationConfig::default(),
        )
        .expect("calibrate")
    }

    fn validation_probs(&self) -> Vec<f64> {
        self.model
            .predict(self.data.validation.features.view())
            .expect("predict")
    }
}

fn row(rows: &[CalibrationOutcome], method: Option<CalibrationMethod>) -> &CalibrationOutcome {
    rows.iter()
        .find(|r| r.method == method)
        .expect("method in plan")
}

const PLATT: CalibrationMethod = CalibrationMethod::Single(CalibFunctionKind::PlattSigmoid);
const SURE_SIG: CalibrationMethod = CalibrationMethod::Single(CalibFunctionKind::SureSigmoid);
const SURE_SIG_PLATT: CalibrationMethod = CalibrationMethod::Stack(
    CalibFunctionKind::SureSigmoid,
    CalibFunctionKind::PlattSigmoid,
);

fn stacks() -> Vec<CalibrationMethod> {
    CalibrationMethod::ALL
        .iter()
        .copied()
        .filter(|m| matches!(m, CalibrationMethod::Stack(..)))
        .collect()
}

fn test_scores(
    rows: &[CalibrationOutcome],
    method: Option<CalibrationMethod>,
) -> Option<(f64, f64, f64)> {
    row(rows, method)
        .test
        .map(|s| (s.mdr_percent, s.bce, s.brier))
}

fn scores_check(
    checks: &mut Vec<Check>,
    rows: &[CalibrationOutcome],
    method: Option<CalibrationMethod>,
    targets: &[(&str, f64, f64)],
) {
    let label = row(rows, method).label();
    match test_scores(rows, method) {
        Some((mdr, bce, bs)) => {
            for &(metric, target, tol) in targets {
                let v = match metric {
                    "MDR" => mdr,
                    "BCE" => bce,
                    _ => bs,
                };
                checks.push(within(&format!("{label} {metric}"), v, target, tol));
            }
        }
        None => checks.push(failed(
            &label,
            row(rows, method).error.as_deref().unwrap_or("no scores"),
        )),
    }
}

fn mdr_sanity(checks: &mut Vec<Check>, model: &str, rows: &[CalibrationOutcome], target: f64) {
    for r in rows.iter().filter(|r| match r.method {
        Some(CalibrationMethod::Single(k)) => k == CalibFunctionKind::PlattSigmoid,
        Some(CalibrationMethod::Stack(..)) => true,
        None => false,
    }) {
        let name = format!("{model} {} val MDR", r.label());
        match r.validation {
            Some(s) => checks.push(within(&name, s.mdr_percent, target, 0.5)),
            None => checks.push(failed(&name, r.error.as_deref().unwrap_or("no scores"))),
        }
    }
}

fn feasibility(checks: &mut Vec<Check>, model: &str, probs: &[f64], labels: &[u8]) {
    for family in [Family::Sigmoid, Family::Kumaraswamy] {
        let name = format!("{model} {family:?} |C|");
        match sure_fit(probs, labels, family, &SureSolverConfig::default()) {
            Ok(fit) => checks.push(at_most(&name, fit.constraint.abs(), 0.1)),
            Err(e) => checks.push(failed(&name, e)),
        }
    }
}

fn dataset_criteria(report: &mut Report, raw: &RawDataset) {
    let start = Instant::now();
    let lr: Vec<Trained> = FeatureSetKind::ALL
        .iter()
        .map(|&fs| Trained::fit(raw, fs, ModelKind::LogReg, SPLIT_SEED))
        .collect();
    let lr_metrics: Vec<_> = lr.iter().map(Trained::test_metrics).collect();

    let lr_targets = [0.40, 0.53, 0.53];
    let mut c1 = Vec::new();
    for ((fs, m), target) in FeatureSetKind::ALL.iter().zip(&lr_metrics).zip(lr_targets) {
        c1.push(within(&format!("F1 {fs}"), m.0, target, 0.03));
    }
    let all = lr_metrics[2];
    c1.push(within("AUC-ROC all", all.1.unwrap_or(f64::NAN), 0.73, 0.02));
    c1.push(within("AUC-PR all", all.2.unwrap_or(f64::NAN), 0.51, 0.03));
    let lr_gap = lr_metrics[1].0 - lr_metrics[0].0;
    c1.push(at_least("F1 dynamic − static", lr_gap, 0.08));
    report.check("C1 logistic regression", &c1);

    let mut nn_f1 = Vec::new();
    let mut nn_auc = Vec::new();
    let mut nn_all: Option<Trained> = None;
    for &fs in &FeatureSetKind::ALL {
        let mut f1s = Vec::new();
        for &seed in &NN_SEEDS {
            let t = Trained::fit(raw, fs, ModelKind::Ffnn, seed);
            let (f1, auc, _) = t.test_metrics();
            f1s.push(f1);
            if fs == FeatureSetKind::All {
                nn_auc.push(auc.unwrap_or(f64::NAN));
                if nn_all.is_none() {
                    nn_all = Some(t);
                }
            }
        }
        nn_f1.push(median(f1s));
    }
    let nn_targets = [0.39, 0.54, 0.55];
    let mut c2 = Vec::new();
    for ((fs, &f1), target) in FeatureSetKind::ALL.iter().zip(&nn_f1).zip(nn_targets) {
        c2.push(within(&format!("median F1 {fs}"), f1, target, 0.04));
    }
    c2.push(within("median AUC-ROC all", median(nn_auc), 0.77, 0.02));
    c2.push(at_least("F1 dynamic − static", nn_f1[1] - nn_f1[0], 0.08));
    report.check("C2 neural network", &c2);

    let lr_all = &lr[2];
    let nn_all = nn_all.expect("ffnn on all features");
    let lr_rows = lr_all.calibrate(&CalibrationMethod::ALL);
    let nn_rows = nn_all.calibrate(&CalibrationMethod::ALL);

    let mut c3 = Vec::new();
    scores_check(
        &mut c3,
        &lr_rows,
        None,
        &[
            ("MDR", 47.04, 2.0),
            ("BCE", 0.613, 0.015),
            ("BS", 0.211, 0.008),
        ],
    );
    scores_check(
        &mut c3,
        &lr_rows,
        Some(PLATT),
        &[
            ("MDR", 22.45, 1.0),
            ("BCE", 0.459, 0.01),
            ("BS", 0.143, 0.005),
        ],
    );
    scores_check(&mut c3, &lr_rows, Some(SURE_SIG), &[("MDR", 25.10, 1.5)]);
    scores_check(
        &mut c3,
        &lr_rows,
        Some(SURE_SIG_PLATT),
        &[("BCE", 0.452, 0.01), ("BS", 0.141, 0.005)],
    );
    report.check("C3 LR calibration", &c3);

    let mut c4 = Vec::new();
    scores_check(
        &mut c4,
        &nn_rows,
        Some(PLATT),
        &[
            ("MDR", 22.37, 1.0),
            ("BCE", 0.436, 0.01),
            ("BS", 0.136, 0.005),
        ],
    );
    if let Some((_, _, platt_bs)) = test_scores(&nn_rows, Some(PLATT)) {
        for m in stacks() {
            match test_scores(&nn_rows, Some(m)) {
                Some((_, _, bs)) => c4.push(at_most(
                    &format!("{} BS − Platt BS", m.label()),
                    bs - platt_bs,
                    0.002,
                )),
                None => c4.push(failed(&m.label(), "fit failed")),
            }
        }
    }
    report.check("C4 NN calibration", &c4);

    let mut c5 = Vec::new();
    mdr_sanity(&mut c5, "LR", &lr_rows, EMPIRICAL_DEFAULT_RATE);
    mdr_sanity(&mut c5, "NN", &nn_rows, EMPIRICAL_DEFAULT_RATE);
    report.check("C5 calibrated MDR", &c5);

    let mut c8 = Vec::new();
    feasibility(
        &mut c8,
        "LR",
        &lr_all.validation_probs(),
        &lr_all.data.validation.labels,
    );
    feasibility(
        &mut c8,
        "NN",
        &nn_all.validation_probs(),
        &nn_all.data.validation.labels,
    );
    report.check("C8 solver feasibility", &c8);

    println!(
        "         dataset criteria took {:.1}s",
        start.elapsed().as_secs_f64()
    );
}

/// Surrogates on synthetic data for the dataset-backed invariants that do
/// not depend on the published numbers.
fn surrogate_criteria(report: &mut Report) {
    let raw = synthetic_credit(12_000, 7);
    let lr = Trained::fit(&raw, FeatureSetKind::All, ModelKind::LogReg, SPLIT_SEED);
    let nn = Trained::fit(&raw, FeatureSetKind::All, ModelKind::Ffnn, 1);
    let lr_rows = lr.calibrate(&CalibrationMethod::ALL);
    let nn_rows = nn.calibrate(&CalibrationMethod::ALL);
    let rate = |d: &PreparedData| {
        100.0
            * d.validation
                .labels
                .iter()
                .map(|&y| f64::from(y))
                .sum::<f64>()
            / d.validation.len() as f64
    };

    // Platt matches the validation mean exactly; a SURE final stage only
    // guarantees the solver's feasibility bound.
    let mut c5 = Vec::new();
    for (model, rows, data) in [("LR", &lr_rows, &lr.data), ("NN", &nn_rows, &nn.data)] {
        let target = rate(data);
        for r in rows.iter().filter(|r| r.method.is_some()) {
            let name = format!("{model} {} val MDR", r.label());
            let tol = match r.method {
                Some(CalibrationMethod::Single(CalibFunctionKind::PlattSigmoid))
                | Some(CalibrationMethod::Stack(_, CalibFunctionKind::PlattSigmoid)) => 0.5,
                _ => 100.0 * SureSolverConfig::default().feasibility_eps,
            };
            match r.validation {
                Some(s) => c5.push(within(&name, s.mdr_percent, target, tol)),
                None => c5.push(failed(&name, r.error.as_deref().unwrap_or("no scores"))),
            }
        }
    }
    report.check("C5 surrogate (synthetic)", &c5);

    let mut c8 = Vec::new();
    feasibility(
        &mut c8,
        "LR",
        &lr.validation_probs(),
        &lr.data.validation.labels,
    );
    feasibility(
        &mut c8,
        "NN",
        &nn.validation_probs(),
        &nn.data.validation.labels,
    );
    report.check("C8 surrogate (synthetic)", &c8);
}

// ----------------------------------------------------------------------------
// Self-contained criteria

fn random_theta(family: Family, rng: &mut ChaCha8Rng) -> [f64; 2] {
    match family {
        Family::Sigmoid => [rng.random_range(0.5..4.0), rng.random_range(-2.0..1.0)],
        Family::Kumaraswamy => [rng.random_range(1.0..3.0), rng.random_range(1.0..3.0)],
    }
}

/// Mean and standard error of `SURE - ||G(p_hat) - p||^2` over noisy draws.
fn sure_bias(
    family: Family,
    theta: [f64; 2],
    sigma: f64,
    reps: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let truth: Vec<f64> = (0..40).map(|_| rng.random_range(0.15..0.85)).collect();
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut noisy = vec![0.0; truth.len()];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..reps {
        for (x, &p) in noisy.iter_mut().zip(&truth) {
            *x = p + noise.sample(rng);
        }
        let sure = sure_loss(theta, &noisy, sigma * sigma, family).unwrap();
        let g = family.derivatives(theta, &noisy).unwrap().g;
        let loss: f64 = g.iter().zip(&truth).map(|(g, p)| (g - p).powi(2)).sum();
        let d = sure - loss;
        sum += d;
        sum_sq += d * d;
    }
    let n = reps as f64;
    let mean = sum / n;
    let var = (sum_sq - n * mean * mean) / (n - 1.0);
    (mean, (var / n).sqrt())
}

const REPS: usize = 10_000;
const RECHECK_REPS: usize = 100_000;

fn c6_unbiasedness(report: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst, mut cases, mut flagged) = (0.0f64, 0, 0);
    for family in [Family::Sigmoid, Family::Kumaraswamy] {
        for _ in 0..5 {
            let theta = random_theta(family, &mut rng);
            for sigma in [0.05, 0.1, 0.2] {
                let (mean, se) = sure_bias(family, theta, sigma, REPS, &mut rng);
                let mut z = mean.abs() / se;
                cases += 1;
                if z > 3.0 {
                    // 30 cases at 3 SE raise a false alarm on ~8% of seeds;
                    // a flagged case must also fail an independent larger batch
                    flagged += 1;
                    let mut fresh = ChaCha8Rng::seed_from_u64(rng.random());
                    let (mean, se) = sure_bias(family, theta, sigma, RECHECK_REPS, &mut fresh);
                    z = mean.abs() / se;
                }
                worst = worst.max(z);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report.check(
        "C6 SURE unbiasedness",
        &[
            at_most(
                &format!("{cases} cases, {flagged} rechecked; worst |bias|/SE"),
                worst,
                3.0,
            ),
            at_most("seconds", secs, 60.0),
        ],
    );
}

fn fd(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

fn map_fd_error(family: Family, theta: [f64; 2], p: f64) -> f64 {
    let at = |t: [f64; 2], x: f64| family.derivatives(t, &[x]).unwrap();
    let g = |t: [f64; 2], x: f64| at(t, x).g[0];
    let gp = |t: [f64; 2], x: f64| at(t, x).dg_dp[0];
    let d = at(theta, p);
    let h = 1e-5;
    [
        (d.dg_dp[0], fd(|x| g(theta, x), p, h)),
        (d.dg_dtheta1[0], fd(|t| g([t, theta[1]], p), theta[0], h)),
        (d.dg_dtheta2[0], fd(|t| g([theta[0], t], p), theta[1], h)),
        (
            d.d2g_dp_dtheta1[0],
            fd(|t| gp([t, theta[1]], p), theta[0], h),
        ),
        (
            d.d2g_dp_dtheta2[0],
            fd(|t| gp([theta[0], t], p), theta[1], h),
        ),
    ]
    .iter()
    .map(|&(a, b)| rel(a, b))
    .fold(0.0, f64::max)
}

fn c7_derivatives(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checks = Vec::new();
    for family in [Family::Sigmoid, Family::Kumaraswamy] {
        let worst = (0..100)
            .map(|_| {
                let (theta, p) = match family {
                    Family::Sigmoid => (
                        [rng.random_range(-4.0..4.0), rng.random_range(-3.0..3.0)],
                        rng.random_range(0.0..1.0),
                    ),
                    Family::Kumaraswamy => (
                        [rng.random_range(0.3..4.0), rng.random_range(0.3..4.0)],
                        rng.random_range(0.05..0.95),
                    ),
                };
                map_fd_error(family, theta, p)
            })
            .fold(0.0, f64::max);
        checks.push(at_most(
            &format!("{family:?} map derivatives rel err"),
            worst,
            1e-6,
        ));

        let worst = (0..100)
            .map(|_| {
                let n = rng.random_range(5..60);
                let probs: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..0.98)).collect();
                let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
                let theta = match family {
                    Family::Sigmoid => [rng.random_range(-3.0..3.0), rng.random_range(-2.0..2.0)],
                    Family::Kumaraswamy => [rng.random_range(0.4..3.0), rng.random_range(0.4..3.0)],
                };
                let mu = rng.random_range(0.0..1000.0);
                let s2 = rng.random_range(0.0..0.05);
                let q = |t: [f64; 2]| penalty_value(t, mu, &probs, &labels, s2, family).unwrap();
                let grad = penalty_gradient(theta, mu, &probs, &labels, s2, family).unwrap();
                let h = 1e-6;
                let num = [
                    fd(|t| q([t, theta[1]]), theta[0], h),
                    fd(|t| q([theta[0], t]), theta[1], h),
                ];
                rel(grad[0], num[0]).max(rel(grad[1], num[1]))
            })
            .fold(0.0, f64::max);
        checks.push(at_most(
            &format!("{family:?} penalty gradient rel err"),
            worst,
            1e-5,
        ));
    }
    report.check("C7 derivative oracles", &checks);
}

fn c9_identity(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let probs: Vec<f64> = (0..5000).map(|_| rng.random_range(0.0..1.0)).collect();
    let labels: Vec<u8> = probs
        .iter()
        .map(|&p| u8::from(rng.random::<f64>() < p))
        .collect();
    let grid: Vec<f64> = (0..=900).map(|i| 0.05 + i as f64 * 0.001).collect();
    let sup = |family: Family, probs: &[f64], labels: &[u8]| -> Result<f64, String> {
        let fit = sure_fit(probs, labels, family, &SureSolverConfig::default())
            .map_err(|e| e.to_string())?;
        let g = family.apply(fit.theta, &grid).map_err(|e| e.to_string())?;
        Ok(g.iter()
            .zip(&grid)
            .map(|(g, p)| (g - p).abs())
            .fold(0.0, f64::max))
    };
    let mut checks = vec![match sup(Family::Kumaraswamy, &probs, &labels) {
        Ok(s) => at_most("Kumaraswamy sup |G(p) − p| on [0.05, 0.95]", s, 0.05),
        Err(e) => failed("Kumaraswamy fit", e),
    }];
    if let Ok(s) = sup(Family::Sigmoid, &probs, &labels) {
        checks.push(Check {
            ok: true,
            text: format!("sigmoid sup {s:.4} (informational)"),
        });
    }
    // calibrated but skewed towards low probabilities
    let beta = rand_distr::Beta::new(2.0, 5.0).unwrap();
    let skewed: Vec<f64> = (0..5000).map(|_| beta.sample(&mut rng)).collect();
    let skewed_labels: Vec<u8> = skewed
        .iter()
        .map(|&p| u8::from(rng.random::<f64>() < p))
        .collect();
    if let Ok(s) = sup(Family::Kumaraswamy, &skewed, &skewed_labels) {
        checks.push(Check {
            ok: true,
            text: format!("Kumaraswamy sup on Beta(2, 5) scores {s:.4} (informational)"),
        });
    }
    report.check("C9 identity recovery", &checks);
}

/// Pairwise Mann-Whitney statistic with half credit for ties.
fn brute_auc(labels: &[u8], probs: &[f64]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &yi) in labels.iter().enumerate() {
        if yi != 1 {
            continue;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yj != 0 {
                continue;
            }
            pairs += 1.0;
            if probs[i] > probs[j] {
                wins += 1.0;
            } else if probs[i] == probs[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// `sum_k (R_k - R_{k-1}) P_k` over distinct thresholds in decreasing order.
fn step_sum_ap(labels: &[u8], probs: &[f64]) -> f64 {
    let mut thresholds = probs.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let positives = labels.iter().filter(|&&y| y == 1).count() as f64;
    let (mut ap, mut prev_recall) = (0.0, 0.0);
    for t in thresholds {
        let (mut tp, mut fp) = (0.0, 0.0);
        for (&y, &p) in labels.iter().zip(probs) {
            if p >= t {
                if y == 1 {
                    tp += 1.0;
                } else {
                    fp += 1.0;
                }
            }
        }
        let recall = tp / positives;
        ap += (recall - prev_recall) * tp / (tp + fp);
        prev_recall = recall;
    }
    ap
}

fn c10_metric_oracles(report: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut roc_err, mut pr_err) = (0.0f64, 0.0f64);
    let mut instances = 0;
    while instances < 1000 {
        let n = rng.random_range(2..=200);
        // coarse grids force ties
        let levels = if rng.random::<bool>() {
            rng.random_range(2..20)
        } else {
            0
        };
        let probs: Vec<f64> = (0..n)
            .map(|_| {
                let p: f64 = rng.random();
                if levels > 0 {
                    (p * levels as f64).floor() / levels as f64
                } else {
                    p
                }
            })
            .collect();
        let labels: Vec<u8> = probs
            .iter()
            .map(|&p| u8::from(rng.random::<f64>() < p))
            .collect();
        if labels.iter().all(|&y| y == labels[0]) {
            continue;
        }
        instances += 1;
        roc_err =
            roc_err.max((auc_roc(&labels, &probs).unwrap() - brute_auc(&labels, &probs)).abs());
        pr_err =
            pr_err.max((auc_pr(&labels, &probs).unwrap() - step_sum_ap(&labels, &probs)).abs());
    }
    report.check(
        "C10 metric oracles",
        &[
            at_most("AUC-ROC vs pairwise, max abs err", roc_err, 1e-12),
            at_most("AUC-PR vs step sum, max abs err", pr_err, 1e-12),
        ],
    );
}

fn dataset_path() -> Option<PathBuf> {
    std::env::var_os("CREDIT_CSV").map(PathBuf::from)
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored
    let require = std::env::var("ACCEPTANCE_REQUIRE_DATASET").is_ok_and(|v| v == "1");
    let mut report = Report { lines: Vec::new() };

    match dataset_path().map(|p| (load_credit_csv(&p), p)) {
        Some((Ok(raw), _)) => dataset_criteria(&mut report, &raw),
        Some((Err(e), p)) => {
            for id in ["C1", "C2", "C3", "C4", "C5", "C8"] {
                report.record(
                    id,
                    Status::Fail,
                    format!("cannot load {}: {e}", p.display()),
                );
            }
        }
        None => {
            for (id, name) in [
                ("C1", "logistic regression"),
                ("C2", "neural network"),
                ("C3", "LR calibration"),
                ("C4", "NN calibration"),
                ("C5", "calibrated MDR"),
                ("C8", "solver feasibility"),
            ] {
                report.record(
                    &format!("{id} {name}"),
                    Status::Blocked,
                    "dataset not found (set CREDIT_CSV)".into(),
                );
            }
        }
    }
    surrogate_criteria(&mut report);
    c6_unbiasedness(&mut report);
    c7_derivatives(&mut report);
    c9_identity(&mut report);
    c10_metric_oracles(&mut report);

    let count = |s: Status| report.lines.iter().filter(|l| l.1 == s).count();
    let (pass, fail, blocked) = (
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Blocked),
    );
    println!("acceptance: {pass} passed, {fail} failed, {blocked} blocked");
    if fail > 0 || (require && blocked > 0) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

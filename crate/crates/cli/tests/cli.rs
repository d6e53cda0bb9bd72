use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use credit_calib::data::synthetic::{synthetic_credit, write_credit_csv};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_credit-calib"));
    cmd.env_remove("CREDIT_CSV");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn credit-calib")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_dataset(dir: &Path, n: usize) -> PathBuf {
    let path = dir.join("credit.csv");
    let file = File::create(&path).unwrap();
    write_credit_csv(&synthetic_credit(n, 7), file).unwrap();
    path
}

fn write_probs(path: &Path, probs: &[f64], labels: &[u8]) {
    let mut f = File::create(path).unwrap();
    writeln!(f, "row_id,raw_prob,calibrated_prob,label").unwrap();
    for (i, (p, y)) in probs.iter().zip(labels).enumerate() {
        writeln!(f, "{i},{p},{p},{y}").unwrap();
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn pipeline(data: &Path, out: &Path, plan: &str) {
    let common = [
        "--out",
        s(out),
        "--features",
        "static",
        "--model",
        "logreg",
        "--seed",
        "3",
    ];
    let mut args = vec!["prepare", "--data", s(data)];
    args.extend(common);
    assert_ok(&run(&args));
    let mut args = vec!["train"];
    args.extend(common);
    assert_ok(&run(&args));
    let mut args = vec!["calibrate", "--plan", plan];
    args.extend(common);
    assert_ok(&run(&args));
}

fn collect_files(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn pipeline_outputs_are_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    let data = write_dataset(tmp.path(), 1500);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    pipeline(&data, &a, "platt,sure-sigmoid+platt");
    pipeline(&data, &b, "platt,sure-sigmoid+platt");

    let (fa, fb) = (collect_files(&a), collect_files(&b));
    assert!(fa.iter().any(|(p, _)| p.ends_with("model.json")));
    assert!(fa.iter().any(|(p, _)| p.ends_with("summary.json")));
    assert!(fa.iter().any(|(p, _)| p.ends_with("platt_test.csv")));
    assert_eq!(fa.len(), fb.len());
    for ((pa, ca), (pb, cb)) in fa.iter().zip(&fb) {
        assert_eq!(pa, pb);
        // The persisted run config records its own output directory.
        if pa.ends_with("run_config.json") {
            continue;
        }
        assert!(ca == cb, "{} differs between runs", pa.display());
    }
}

#[test]
fn empty_plan_keeps_only_the_baseline() {
    let tmp = TempDir::new().unwrap();
    let data = write_dataset(tmp.path(), 1200);
    let out = tmp.path().join("runs");
    pipeline(&data, &out, "none");

    let dir = out.join("static/logreg/calibration");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    let rows = summary.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["method"], "uncalibrated");
    assert!(dir.join("uncalibrated_test.csv").is_file());
}

#[test]
fn missing_dataset_exits_with_code_2() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.csv");
    let out = run(&["prepare", "--data", s(&missing), "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert!(!tmp.path().join("all").exists());
}

#[test]
fn unset_dataset_exits_with_code_2() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["prepare", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("CREDIT_CSV"));
}

#[test]
fn dataset_path_falls_back_to_environment() {
    let tmp = TempDir::new().unwrap();
    let data = write_dataset(tmp.path(), 600);
    let out = bin()
        .env("CREDIT_CSV", &data)
        .args(["prepare", "--out", s(tmp.path()), "--features", "dynamic"])
        .output()
        .unwrap();
    assert_ok(&out);
    assert!(tmp.path().join("dynamic/prepared").is_dir());
}

#[test]
fn zero_bins_exits_with_code_2() {
    let tmp = TempDir::new().unwrap();
    let probs = tmp.path().join("p.csv");
    write_probs(&probs, &[0.2, 0.8], &[0, 1]);
    let out = run(&[
        "reliability",
        "--input",
        s(&probs),
        "--bins",
        "0",
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn train_without_prepare_exits_with_code_2() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["train", "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
}

fn read_bins(path: &Path) -> Vec<(usize, Option<f64>, Option<f64>)> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            let opt = |s: &str| {
                if s.is_empty() {
                    None
                } else {
                    Some(s.parse().unwrap())
                }
            };
            (r[3].parse().unwrap(), opt(&r[4]), opt(&r[5]))
        })
        .collect()
}

#[test]
fn reliability_bin_counts_sum_to_n() {
    let tmp = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 2000;
    let probs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let labels: Vec<u8> = probs
        .iter()
        .map(|&p| u8::from(rng.random::<f64>() < p))
        .collect();
    let input = tmp.path().join("p.csv");
    write_probs(&input, &probs, &labels);

    for m in [10usize, 50] {
        let output = tmp.path().join(format!("bins{m}.csv"));
        let m_arg = m.to_string();
        assert_ok(&run(&[
            "reliability",
            "--input",
            s(&input),
            "--bins",
            &m_arg,
            "--output",
            s(&output),
        ]));
        let bins = read_bins(&output);
        assert_eq!(bins.len(), m);
        assert_eq!(bins.iter().map(|b| b.0).sum::<usize>(), n);
    }
}

#[test]
fn perfectly_calibrated_input_has_small_ece() {
    let tmp = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 10_000;
    let probs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let labels: Vec<u8> = probs
        .iter()
        .map(|&p| u8::from(rng.random::<f64>() < p))
        .collect();
    let input = tmp.path().join("p.csv");
    write_probs(&input, &probs, &labels);

    let out = run(&[
        "reliability",
        "--input",
        s(&input),
        "--bins",
        "10",
        "--out",
        s(tmp.path()),
    ]);
    assert_ok(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let ece: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("ECE "))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(ece < 0.02, "ECE {ece}");
    assert!(tmp.path().join("reliability_m10.csv").is_file());
}

#[test]
fn report_writes_metrics_json() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("p.csv");
    write_probs(&input, &[0.1, 0.4, 0.35, 0.8], &[0, 0, 1, 1]);
    let output = tmp.path().join("r.json");
    assert_ok(&run(&[
        "report",
        "--input",
        s(&input),
        "--output",
        s(&output),
        "--tau",
        "0.5",
    ]));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(report["n"], 4);
    assert!((report["auc_roc"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn out_of_range_tau_exits_with_code_2() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("p.csv");
    write_probs(&input, &[0.1, 0.9], &[0, 1]);
    let out = run(&[
        "report",
        "--input",
        s(&input),
        "--tau",
        "1.5",
        "--out",
        s(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

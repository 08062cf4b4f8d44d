use std::path::Path;
use std::process::{Command, Output};

fn seizure(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seizure"))
        .args(args)
        .output()
        .expect("failed to launch the binary")
}

fn synth(dir: &Path, rows_per_class: &str) -> String {
    let path = dir.join("eeg.csv").to_string_lossy().into_owned();
    let out = seizure(&["synth", "--out", &path, "--rows-per-class", rows_per_class]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

const QUICK: &str = r#"
[logistic_regression]
epochs = 50

[random_forest]
n_trees = 5

[extra_trees]
n_trees = 5

[gradient_boosting]
n_stages = 5
"#;

#[test]
fn run_writes_reports_and_models_that_predict() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "40");
    let config = dir.path().join("quick.toml");
    std::fs::write(&config, QUICK).unwrap();
    let results = dir.path().join("results");
    let out = seizure(&[
        "run",
        "--data",
        &data,
        "--config",
        config.to_str().unwrap(),
        "--out",
        results.to_str().unwrap(),
        "--save-models",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("Extra Trees"));
    for name in [
        "report.json",
        "metrics.csv",
        "confusion_matrices.csv",
        "roc_extra_trees.csv",
    ] {
        assert!(results.join(name).is_file(), "missing {name}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(results.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["models"].as_array().unwrap().len(), 5);

    let scores = dir.path().join("scores.csv");
    let out = seizure(&[
        "predict",
        "--model",
        results.join("models/random_forest.json").to_str().unwrap(),
        "--data",
        &data,
        "--out",
        scores.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(scores).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 200);
    assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn model_subset_and_sound_mode() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "30");
    let results = dir.path().join("r");
    let out = seizure(&[
        "run",
        "--data",
        &data,
        "--mode",
        "sound",
        "--models",
        "dt,lr",
        "--out",
        results.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let metrics = std::fs::read_to_string(results.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 3);
    assert!(!results.join("roc_extra_trees.csv").exists());
}

#[test]
fn eda_writes_summary_files() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth(dir.path(), "20");
    let out_dir = dir.path().join("eda");
    let out = seizure(&["eda", "--data", &data, "--out", out_dir.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["eda.json", "correlation.csv", "outliers.csv"] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }
    assert!(String::from_utf8_lossy(&out.stdout).contains("20 seizure"));
}

#[test]
fn bad_invocations_fail_cleanly() {
    let out = seizure(&["run"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--data"));

    let out = seizure(&["run", "--data", "/nonexistent/eeg.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("load"));

    let out = seizure(&["run", "--data", "x.csv", "--models", "svm"]);
    assert!(!out.status.success());

    let out = seizure(&["run", "--frobnicate"]);
    assert!(!out.status.success());
}

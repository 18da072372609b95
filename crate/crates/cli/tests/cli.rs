//! Black-box tests for the `aead` binary: exit codes, determinism of
//! `synth` and `train`, and an end-to-end pipeline over temp files.

use std::path::Path;
use std::process::{Command, Output};

fn aead(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aead"))
        .args(args)
        .output()
        .expect("failed to spawn aead")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn no_arguments_is_a_usage_error() {
    let output = aead(&[]);
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
    assert!(
        stderr(&output).contains("Usage"),
        "stderr: {}",
        stderr(&output)
    );
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let output = aead(&["fabricate"]);
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
}

#[test]
fn missing_input_file_fails_and_names_the_path() {
    let output = aead(&[
        "score",
        "--ckpt",
        "/nonexistent/model.json",
        "--data",
        "x.csv",
        "--out",
        "y.csv",
    ]);
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    assert!(err.starts_with("error: "), "stderr: {err}");
    assert!(err.contains("/nonexistent/model.json"), "stderr: {err}");
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let output = aead(&[
            "synth",
            "--seed",
            "11",
            "--normal",
            "50",
            "--anomalies",
            "5",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    }
    let bytes = read(&a);
    assert_eq!(
        bytes,
        read(&b),
        "same seed must give byte-identical datasets"
    );

    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.ends_with(",anomaly"), "header: {header}");
    assert_eq!(lines.count(), 55, "50 normal + 5 anomalous rows");
}

#[test]
fn train_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let output = aead(&[
        "synth",
        "--seed",
        "3",
        "--normal",
        "40",
        "--anomalies",
        "4",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let output = aead(&[
            "train",
            "--arch",
            "simple",
            "--data",
            data.to_str().unwrap(),
            "--epochs",
            "25",
            "--lr",
            "0.1",
            "--seed",
            "9",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    }
    assert_eq!(
        read(&a),
        read(&b),
        "same seed must give byte-identical checkpoints"
    );

    // The loss history sits next to the checkpoint: header + one row per epoch.
    let history = String::from_utf8(read(&dir.path().join("a.json.loss.csv"))).unwrap();
    assert_eq!(
        history.lines().next().unwrap(),
        "epoch,total,supervised,reconstruction"
    );
    assert_eq!(history.lines().count(), 26);
}

#[test]
fn pipeline_synth_train_score_sweep_detect_hist() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();

    let data = path("data.csv");
    let output = aead(&[
        "synth",
        "--seed",
        "5",
        "--normal",
        "60",
        "--anomalies",
        "6",
        "--out",
        &data,
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    let model = path("model.json");
    let output = aead(&[
        "train",
        "--arch",
        "simple",
        "--data",
        &data,
        "--epochs",
        "30",
        "--lr",
        "0.1",
        "--seed",
        "1",
        "--holdout",
        "0.25",
        "--out",
        &model,
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let out = stdout(&output);
    assert!(out.contains("trained 30 epochs"), "stdout: {out}");
    assert!(out.contains("holdout: 16 rows"), "stdout: {out}");

    let scores = path("scores.csv");
    let output = aead(&["score", "--ckpt", &model, "--data", &data, "--out", &scores]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = String::from_utf8(read(Path::new(&scores))).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "row_index,score,flagged,label"
    );
    assert_eq!(text.lines().count(), 67, "header + one row per record");

    let flagged = path("flagged.csv");
    let output = aead(&[
        "sweep", "--ckpt", &model, "--data", &data, "--out", &flagged,
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let out = stdout(&output);
    assert!(out.contains("lower threshold:"), "stdout: {out}");
    assert!(out.contains("upper threshold:"), "stdout: {out}");
    assert!(out.contains("Detected:"), "stdout: {out}");
    assert!(Path::new(&flagged).exists());

    let output = aead(&[
        "detect", "--ckpt", &model, "--data", &data, "--lower", "-1.0", "--upper", "0.5",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let out = stdout(&output);
    assert!(out.contains("flagged"), "stdout: {out}");
    assert!(out.contains("True Positives:"), "stdout: {out}");

    let hist = path("hist.csv");
    let output = aead(&["hist", "--scores", &scores, "--bins", "5", "--out", &hist]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = String::from_utf8(read(Path::new(&hist))).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "bin_lo,bin_hi,count_normal,count_anomalous"
    );
    assert_eq!(text.lines().count(), 6, "header + five bins");
}

#[test]
fn supervised_training_requires_labels() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("unlabeled.csv");
    let header = (0..13)
        .map(|i| format!("f{i}"))
        .collect::<Vec<_>>()
        .join(",");
    let row = ["0.5"; 13].join(",");
    std::fs::write(&data, format!("{header}\n{row}\n{row}\n{row}\n")).unwrap();

    let output = aead(&[
        "train",
        "--arch",
        "sdae",
        "--data",
        data.to_str().unwrap(),
        "--epochs",
        "2",
        "--out",
        dir.path().join("m.json").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "stdout: {}", stdout(&output));
    assert!(
        stderr(&output).starts_with("error: "),
        "stderr: {}",
        stderr(&output)
    );
}

#[test]
fn sweep_requires_labels() {
    let dir = tempfile::tempdir().unwrap();
    let labeled = dir.path().join("labeled.csv");
    let output = aead(&[
        "synth",
        "--seed",
        "2",
        "--normal",
        "30",
        "--anomalies",
        "3",
        "--out",
        labeled.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let model = dir.path().join("m.json");
    let output = aead(&[
        "train",
        "--arch",
        "simple",
        "--data",
        labeled.to_str().unwrap(),
        "--epochs",
        "5",
        "--lr",
        "0.1",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));

    // Strip the label column to make an unlabeled copy of the same data.
    let text = String::from_utf8(read(&labeled)).unwrap();
    let unlabeled: String = text
        .lines()
        .map(|line| {
            let cut = line.rfind(',').unwrap();
            format!("{}\n", &line[..cut])
        })
        .collect();
    let unlabeled_path = dir.path().join("unlabeled.csv");
    std::fs::write(&unlabeled_path, unlabeled).unwrap();

    let output = aead(&[
        "sweep",
        "--ckpt",
        model.to_str().unwrap(),
        "--data",
        unlabeled_path.to_str().unwrap(),
        "--out",
        dir.path().join("f.csv").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(
        stderr(&output).contains("labeled"),
        "stderr: {}",
        stderr(&output)
    );
}

#[test]
fn gradcheck_reports_relative_error() {
    let output = aead(&["gradcheck", "--arch", "simple", "--seed", "1"]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let out = stdout(&output);
    let line = out
        .lines()
        .find(|l| l.starts_with("max relative error:"))
        .unwrap_or_else(|| panic!("stdout: {out}"));
    let value: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(value < 1e-4, "relative error {value}");
}

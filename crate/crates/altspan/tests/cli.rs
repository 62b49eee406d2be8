//! CLI behavior: exit codes, flag/config precedence, stage dependency
//! errors, and synth determinism, exercised through the real binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_altspan"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("altspan-cli-{tag}"));
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn missing_input_is_a_config_error_with_no_outputs() {
    let dir = temp_dir("missing-input");
    let out_dir = dir.join("out");
    let output = bin()
        .args(["run-all", "--input"])
        .arg(dir.join("nope.jsonl"))
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "{}", stderr_of(&output));
    assert!(!out_dir.exists(), "no outputs on config error");
}

#[test]
fn train_without_cluster_artifacts_is_a_dependency_error() {
    let dir = temp_dir("dependency");
    let corpus = dir.join("corpus.jsonl");
    let out_dir = dir.join("out");
    let ok = bin()
        .args(["synth", "--n", "300", "--seed", "3", "--out"])
        .arg(&corpus)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", stderr_of(&ok));

    // Ingest and metrics succeed, then train is missing the cluster stage.
    for stage in ["ingest", "metrics"] {
        let output = bin()
            .arg(stage)
            .arg("--input")
            .arg(&corpus)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "{stage}: {}", stderr_of(&output));
    }
    let output = bin()
        .arg("train")
        .arg("--input")
        .arg(&corpus)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "{}", stderr_of(&output));
    let stderr = stderr_of(&output);
    assert!(
        stderr.contains("year_clusters.csv"),
        "dependency error names the missing file: {stderr}"
    );

    // The failure is marked in the manifest, partial outputs retained.
    let manifest = std::fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"status\": \"FAILED\""), "{manifest}");
    assert!(out_dir.join("longevity.csv").is_file());
}

#[test]
fn synth_is_deterministic_across_invocations() {
    let dir = temp_dir("synth-repro");
    let a = dir.join("a.jsonl");
    let b = dir.join("b.jsonl");
    for path in [&a, &b] {
        let output = bin()
            .args(["synth", "--n", "1000", "--seed", "7", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!std::fs::read(dir.join("ground_truth.json")).unwrap().is_empty());
}

#[test]
fn flags_override_config_file() {
    let dir = temp_dir("precedence");
    let corpus = dir.join("corpus.jsonl");
    bin()
        .args(["synth", "--n", "400", "--seed", "5", "--out"])
        .arg(&corpus)
        .output()
        .unwrap();

    let config_path = dir.join("run.conf");
    std::fs::write(
        &config_path,
        format!(
            "input = {}\nout = {}\nseed = 1\npub_start = 2013\npub_end = 2016\n",
            corpus.display(),
            dir.join("out-file").display()
        ),
    )
    .unwrap();

    // The flag narrows the window further than the file.
    let out_flag = dir.join("out-flag");
    let output = bin()
        .arg("ingest")
        .arg("--config")
        .arg(&config_path)
        .arg("--out")
        .arg(&out_flag)
        .args(["--pub-start", "2015"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    let stats = std::fs::read_to_string(out_flag.join("corpus_stats.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stats).unwrap();
    assert!(parsed["n_dropped_window"].as_u64().unwrap() > 0);

    // File-only run keeps the wider window and drops fewer records.
    let output = bin()
        .arg("ingest")
        .arg("--config")
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    let stats_file = std::fs::read_to_string(dir.join("out-file/corpus_stats.json")).unwrap();
    let parsed_file: serde_json::Value = serde_json::from_str(&stats_file).unwrap();
    assert!(
        parsed_file["n_dropped_window"].as_u64().unwrap()
            < parsed["n_dropped_window"].as_u64().unwrap()
    );
}

#[test]
fn bad_model_list_is_a_config_error() {
    let output = bin()
        .args([
            "run-all",
            "--input",
            "/dev/null",
            "--out",
            "/tmp/altspan-cli-bad-models",
            "--models",
            "linear,quantum",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "{}", stderr_of(&output));
}

#[test]
fn run_all_then_stage_rerun_keeps_artifacts_stable() {
    let dir = temp_dir("stage-rerun");
    let corpus = dir.join("corpus.jsonl");
    bin()
        .args(["synth", "--n", "800", "--seed", "9", "--out"])
        .arg(&corpus)
        .output()
        .unwrap();
    let out_dir = dir.join("out");
    let run = |args: &[&str]| {
        let output = bin()
            .args(args)
            .arg("--input")
            .arg(&corpus)
            .arg("--out")
            .arg(&out_dir)
            .args(["--seed", "21"])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "{args:?}: {}", stderr_of(&output));
    };
    run(&["run-all"]);
    let before = std::fs::read(out_dir.join("clusters.csv")).unwrap();
    // Re-running a single stage over existing artifacts reproduces them.
    run(&["cluster"]);
    let after = std::fs::read(out_dir.join("clusters.csv")).unwrap();
    assert_eq!(before, after);
}

fn read_to_string_or_panic(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn report_files_use_undefined_sentinel_not_nan() {
    let dir = temp_dir("sentinel");
    let corpus = dir.join("corpus.jsonl");
    bin()
        .args(["synth", "--n", "1200", "--seed", "13", "--out"])
        .arg(&corpus)
        .output()
        .unwrap();
    let out_dir = dir.join("out");
    let output = bin()
        .arg("run-all")
        .arg("--input")
        .arg(&corpus)
        .arg("--out")
        .arg(&out_dir)
        .args(["--seed", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr_of(&output));
    for entry in std::fs::read_dir(&out_dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            let text = read_to_string_or_panic(&path);
            assert!(!text.contains("NaN"), "{} contains NaN", path.display());
            assert!(!text.contains("inf"), "{} contains inf", path.display());
        }
    }
}

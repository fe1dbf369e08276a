//! Behavior tests for the command-line interface: argument handling,
//! config-file merging, diagnostics, and output plumbing. Each test drives
//! the compiled binary on a tiny generated corpus.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn vest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes a 1-series corpus of the given length and returns its directory.
fn tiny_corpus(dir: &Path, length: usize) -> String {
    let corpus = dir.join("corpus");
    let out = vest(&[
        "generate",
        "--series",
        "1",
        "--length",
        &length.to_string(),
        "--seed",
        "3",
        "--out",
        corpus.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    corpus.to_str().unwrap().to_string()
}

#[test]
fn version_and_help_are_printed() {
    let out = vest(&["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));

    let out = vest(&["--help"]);
    assert!(out.status.success());
    let help = String::from_utf8_lossy(&out.stdout).into_owned();
    for cmd in [
        "features",
        "experiment",
        "importance",
        "sample-size",
        "generate",
    ] {
        assert!(help.contains(cmd), "help is missing {cmd}");
    }
}

#[test]
fn unknown_method_error_lists_valid_ids() {
    let out = vest(&["experiment", "--methods", "BOGUS"]);
    assert!(!out.status.success());
    let err = stderr_of(&out);
    assert!(
        err.contains("BOGUS"),
        "diagnostic should echo the bad name: {err}"
    );
    for id in ["AR", "VEST", "AR+VEST", "AR+BT", "AR+BF"] {
        assert!(err.contains(id), "diagnostic should list {id}: {err}");
    }
}

#[test]
fn missing_input_path_fails_with_diagnostic() {
    let out = vest(&["features", "--input", "/no/such/file.csv"]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("file.csv"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("vest.conf");
    fs::write(&cfg, "bogus-key = 1\n").unwrap();
    let out = vest(&["experiment", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("bogus-key"));
}

#[test]
fn features_logs_full_catalog_width_and_writes_artifacts() {
    let dir = tempdir().unwrap();
    let corpus = tiny_corpus(dir.path(), 260);
    let feat = dir.path().join("feat");
    let out = vest(&[
        "features",
        "--input",
        &corpus,
        "--p-min",
        "5",
        "--p-max",
        "5",
        "--out",
        feat.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("256 columns"));

    let csv = fs::read_to_string(feat.join("features-synthetic-00.csv")).unwrap();
    assert!(csv.starts_with("# vest "));
    let json: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(feat.join("selection-synthetic-00.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["dimension"], 5);
    assert!(json["kept"].as_u64().unwrap() > 0);
    assert!(json["model"]["kept_columns"].is_array());
    assert_eq!(json["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn no_frequency_drops_the_seasonal_representations() {
    let dir = tempdir().unwrap();
    let corpus = tiny_corpus(dir.path(), 260);
    let out = vest(&[
        "features",
        "--input",
        &corpus,
        "--no-frequency",
        "--p-min",
        "5",
        "--p-max",
        "5",
        "--out",
        dir.path().join("feat").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(
        stderr_of(&out).contains("192 columns"),
        "{}",
        stderr_of(&out)
    );
}

#[test]
fn cli_flags_override_config_file_values() {
    let dir = tempdir().unwrap();
    let corpus = tiny_corpus(dir.path(), 260);
    let cfg = dir.path().join("vest.conf");
    fs::write(
        &cfg,
        "repetitions = 3\nmethods = AR\np-min = 5\np-max = 6\n",
    )
    .unwrap();
    let outdir = dir.path().join("exp");
    let out = vest(&[
        "experiment",
        "--config",
        cfg.to_str().unwrap(),
        "--repetitions",
        "2",
        "--input",
        &corpus,
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(outdir.join("report.json")).unwrap()).unwrap();
    // CLI repetitions beat the file; the file's method list is still used
    assert_eq!(json["repetitions"], 2);
    assert_eq!(json["methods"].as_array().unwrap().len(), 1);
    assert_eq!(json["methods"][0], "AR");
    let mase = fs::read_to_string(outdir.join("mase.csv")).unwrap();
    // meta line + header + 1 series x 1 method x 2 repetitions
    assert_eq!(mase.lines().count(), 4, "{mase}");
}

#[test]
fn single_repetition_run_works() {
    let dir = tempdir().unwrap();
    let corpus = tiny_corpus(dir.path(), 260);
    let outdir = dir.path().join("exp");
    let out = vest(&[
        "experiment",
        "--input",
        &corpus,
        "--repetitions",
        "1",
        "--methods",
        "AR",
        "--p-min",
        "5",
        "--p-max",
        "6",
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let mase = fs::read_to_string(outdir.join("mase.csv")).unwrap();
    assert_eq!(mase.lines().count(), 3, "{mase}");
}

#[test]
fn importance_emits_three_tables_with_a_lag_group() {
    let dir = tempdir().unwrap();
    let corpus = tiny_corpus(dir.path(), 260);
    let outdir = dir.path().join("imp");
    let out = vest(&[
        "importance",
        "--input",
        &corpus,
        "--p-min",
        "5",
        "--p-max",
        "5",
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    for file in [
        "importance.csv",
        "importance_by_transform.csv",
        "importance_by_summary.csv",
    ] {
        let text = fs::read_to_string(outdir.join(file)).unwrap();
        assert!(text.starts_with("# vest "), "{file} lacks the meta line");
    }
    let by_transform = fs::read_to_string(outdir.join("importance_by_transform.csv")).unwrap();
    assert!(
        by_transform.lines().any(|l| l.starts_with("LAG,")),
        "lag group missing:\n{by_transform}"
    );
}

#[test]
fn custom_size_grid_is_honored() {
    let dir = tempdir().unwrap();
    let corpus = tiny_corpus(dir.path(), 260);
    let outdir = dir.path().join("ss");
    let out = vest(&[
        "sample-size",
        "--input",
        &corpus,
        "--sizes",
        "80,160",
        "--p-min",
        "5",
        "--p-max",
        "5",
        "--methods",
        "AR",
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let ranks = fs::read_to_string(outdir.join("ranks.csv")).unwrap();
    assert!(ranks.lines().any(|l| l.starts_with("80,AR,")));
    assert!(ranks.lines().any(|l| l.starts_with("160,AR,")));
}

#[test]
fn generate_is_seed_deterministic() {
    let dir = tempdir().unwrap();
    let a = tiny_corpus(&dir.path().join("a"), 120);
    let b = tiny_corpus(&dir.path().join("b"), 120);
    let bytes_a = fs::read(Path::new(&a).join("synthetic-00.csv")).unwrap();
    let bytes_b = fs::read(Path::new(&b).join("synthetic-00.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b);

    let out = vest(&[
        "generate",
        "--series",
        "1",
        "--length",
        "120",
        "--seed",
        "4",
        "--out",
        dir.path().join("c").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let bytes_c = fs::read(dir.path().join("c").join("synthetic-00.csv")).unwrap();
    assert_ne!(bytes_a, bytes_c, "different seeds should differ");
}

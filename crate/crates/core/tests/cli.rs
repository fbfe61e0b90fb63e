use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gsh::harness::{ExperimentReport, AGGREGATE_CSV_HEADER};
use serde_json::Value;

fn gsh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_graph(dir: &Path) -> PathBuf {
    let path = dir.join("graph.txt");
    let mut text = String::from("# small test graph\n");
    for a in 0..12u64 {
        for b in a + 1..12 {
            if (a * 7 + b * 3) % 4 == 0 {
                text.push_str(&format!("{a} {b}\n"));
            }
        }
    }
    fs::write(&path, text).unwrap();
    path
}

fn strip_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("generated_at");
    v
}

#[test]
fn experiment_json_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_graph(dir.path());
    let args = [
        "experiment",
        "--input",
        input.to_str().unwrap(),
        "--p",
        "0.3,0.5",
        "--q",
        "0.6",
        "--runs",
        "20",
        "--seed",
        "9",
    ];
    let first = gsh(&args);
    let second = gsh(&args);
    assert!(
        first.status.success(),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let a: Value = serde_json::from_slice(&first.stdout).unwrap();
    let b: Value = serde_json::from_slice(&second.stdout).unwrap();
    assert_eq!(strip_timestamp(a.clone()), strip_timestamp(b));

    let report: ExperimentReport = serde_json::from_value(a.clone()).unwrap();
    assert_eq!(report.runs.len(), 40);
    assert_eq!(report.aggregates.len(), 2);
    assert_eq!(serde_json::to_value(&report).unwrap(), a);
    assert!(dir.path().join("graph.txt.exact.json").exists());
}

#[test]
fn experiment_output_is_byte_identical_apart_from_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_graph(dir.path());
    let run = || {
        let out = gsh(&[
            "experiment",
            "--input",
            input.to_str().unwrap(),
            "--runs",
            "5",
            "--no-cache",
        ]);
        let text = String::from_utf8(out.stdout).unwrap();
        text.lines()
            .filter(|l| !l.contains("\"generated_at\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(run(), run());
}

#[test]
fn csv_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_graph(dir.path());
    let input = input.to_str().unwrap();

    let out = gsh(&[
        "experiment",
        "--input",
        input,
        "--runs",
        "4",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some(AGGREGATE_CSV_HEADER));
    assert_eq!(text.lines().count(), 1 + 4);

    let out = gsh(&[
        "experiment",
        "--input",
        input,
        "--runs",
        "4",
        "--format",
        "csv",
        "--per-run",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("p,q,run,seed,sample_size,fraction,N_K,N_K_var"));
    assert_eq!(text.lines().count(), 1 + 4);

    let out = gsh(&["exact", "--input", input, "--format", "csv", "--no-cache"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("n,n_k,n_t,n_lambda,alpha,density")
    );
}

#[test]
fn sample_and_enumerate() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_graph(dir.path());
    let out_file = dir.path().join("sample.json");
    let out = gsh(&[
        "sample",
        "--input",
        input.to_str().unwrap(),
        "--p",
        "0.5",
        "--q",
        "0.5",
        "--stats",
        "N_K,N_T,N_V",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&fs::read(&out_file).unwrap()).unwrap();
    let reports = v["runs"][0]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports[2]["variance"].is_null());

    let path = dir.path().join("path.txt");
    fs::write(&path, "1 2\n2 3\n3 4\n").unwrap();
    let out = gsh(&[
        "enumerate",
        "--input",
        path.to_str().unwrap(),
        "--p",
        "0.5",
        "--q",
        "1",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 4);
    assert_eq!(v["total_probability"].as_f64(), Some(1.0));
    assert_eq!(
        v["outcomes"][0]["weights"],
        serde_json::json!([2.0, 1.0, 1.0])
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_graph(dir.path());
    let input = input.to_str().unwrap();

    assert_eq!(gsh(&["exact", "--input", input]).status.code(), Some(0));
    assert_eq!(gsh(&["--help"]).status.code(), Some(0));

    // usage and configuration errors
    assert_eq!(gsh(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        gsh(&["sample", "--input", input, "--p", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        gsh(&["sample", "--input", input, "--stats", "N_X"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        gsh(&["sample", "--input", input, "--directed", "--stats", "N_T"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        gsh(&[
            "sample",
            "--input",
            input,
            "--directed",
            "--triangle-closure",
            "true"
        ])
        .status
        .code(),
        Some(1)
    );

    // input errors
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        gsh(&["exact", "--input", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 2\nthree four\n").unwrap();
    let out = gsh(&["exact", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "# nothing\n5 5\n").unwrap();
    assert_eq!(
        gsh(&["exact", "--input", empty.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn directed_sampling_reports_edges() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_graph(dir.path());
    let out = gsh(&[
        "sample",
        "--input",
        input.to_str().unwrap(),
        "--directed",
        "--triangle-closure",
        "false",
        "--p",
        "0.4",
        "--q",
        "0.4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = v["runs"][0]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["statistic"], "N_K");
}

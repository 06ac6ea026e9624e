//! End-to-end runs of the `quasifix` binary and library entry point.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use quasifix_cli::{run, ResultFile, VerifyReport};

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quasifix"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn exit_status_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[(&str, i32)] = &[
        (
            r#"{"mode":"solve","norm":{"kind":"maligranda_ap","a":2,"p":1},"map":{"kind":"reflection"},
            "params":{"b":0.5,"theta":0.5},"x0":[2,2]}"#,
            0,
        ),
        (
            r#"{"mode":"solve","norm":{"kind":"standard_p","p":2},"map":{"kind":"affine","matrix":[[0.5,0],[0,0.5]],"offset":[1,1]},
            "params":{"b":0},"x0":"random:3"}"#,
            0,
        ),
        (
            r#"{"mode":"solve","norm":{"kind":"standard_p","p":1},"map":{"kind":"reflection","dim":1},
            "params":{"b":0.5,"theta":0.5},"x0":[2],"solver":{"lambda_override":1}}"#,
            2,
        ),
        (
            r#"{"mode":"solve","norm":{"kind":"standard_p","p":1},"map":{"kind":"affine","matrix":[[2]],"offset":[0]},
            "params":{"b_grid":[0,1]},"x0":[1]}"#,
            2,
        ),
        (
            r#"{"mode":"solve","norm":{"kind":"standard_p","p":1},"map":{"kind":"expr","exprs":["x1/2 + 1"]},
            "params":{"b":0,"theta":0.5},"x0":[0],"solver":{"max_iter":3}}"#,
            2,
        ),
        (
            r#"{"mode":"maia","norm":{"kind":"standard_p","p":1},"second_norm":{"kind":"standard_p","p":"inf"},
            "map":{"kind":"reflection","dim":2},"params":{"b":0.5,"theta":0.5},"x0":[2,2]}"#,
            2,
        ),
        (
            r#"{"mode":"estimate","norm":{"kind":"standard_p","p":1},"map":{"kind":"affine","matrix":[[2]],"offset":[0]}}"#,
            0,
        ),
        (
            r#"{"mode":"solve","norm":{"kind":"standard_p","p":1},"map":{"kind":"reflection"},"x0":[1,2,3],"dim":2}"#,
            3,
        ),
        (
            r#"{"mode":"solve","norm":{"kind":"standard_p","p":0.5},"map":{"kind":"reflection"},"x0":[1]}"#,
            3,
        ),
        (
            r#"{"mode":"solve","norm":{"kind":"standard_p","p":1},"map":{"kind":"expr","exprs":["x1 +"]},"x0":[1]}"#,
            3,
        ),
        (
            r#"{"mode":"asymptotic","norm":{"kind":"standard_p","p":1},"map":{"kind":"step"},"x0":[1]}"#,
            3,
        ),
        (
            r#"{"mode":"solve","norm":{"kind":"standard_p","p":1},"map":{"kind":"reflection"},
            "params":{"b":0.5,"theta":2},"x0":[1]}"#,
            3,
        ),
        ("not json", 3),
    ];
    for (i, (text, want)) in cases.iter().enumerate() {
        let cfg = write_config(tmp.path(), text);
        let out = tmp.path().join(format!("out{i}"));
        let o = bin()
            .arg("run")
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        let stdout = String::from_utf8(o.stdout).unwrap();
        assert_eq!(o.status.code(), Some(*want), "case {i}: {stdout}");
        assert!(stdout.starts_with("mode="), "{stdout}");
        assert_eq!(stdout.lines().count(), 1);
        let diag = out.join("diagnostic.json");
        assert_eq!(diag.exists(), *want != 0, "case {i}");
    }
}

#[test]
fn missing_config_file_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&tmp.path().join("absent.json"), tmp.path(), None);
    assert_eq!(o.exit_code, 3);
    assert_eq!(o.summary.status, "ConfigParseError");
}

#[test]
fn reflection_summary_and_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run"])
        .arg(example("example_3_3.json"))
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let line = String::from_utf8(o.stdout).unwrap();
    let fields: Vec<_> = line
        .split_whitespace()
        .map(|f| f.split('=').next().unwrap())
        .collect();
    assert_eq!(
        &fields[..5],
        &["mode", "status", "point", "iters", "residual"]
    );

    let text = fs::read_to_string(tmp.path().join("result.json")).unwrap();
    let parsed: ResultFile = serde_json::from_str(&text).unwrap();
    for c in parsed.result.point.coords() {
        assert!((c - 0.5).abs() < 1e-9);
    }
    // re-serializing reproduces the file byte for byte
    assert_eq!(quasifix::export::to_json(&parsed), text);
    let csv = fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), parsed.result.trace.points.len() + 1);
    assert!(parsed.uniqueness.unwrap().max_pairwise_distance < 1e-6);
}

#[test]
fn picard_failure_trace_is_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&example("example_3_3_picard_fail.json"), tmp.path(), None);
    assert_eq!(o.exit_code, 2);
    assert_eq!(o.summary.status, "DivergenceDetected");
    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("diagnostic.json")).unwrap())
            .unwrap();
    assert_eq!(diag["status"], "DivergenceDetected");
    let csv = fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    let residuals: Vec<_> = csv
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').nth(3))
        .filter(|r| !r.is_empty())
        .collect();
    assert!(residuals.len() >= 2);
    assert!(residuals.iter().all(|r| *r == residuals[0]));
}

#[test]
fn tychonoff_report() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&example("tychonoff_verify.json"), tmp.path(), Some(2));
    assert_eq!(o.exit_code, 0);
    let r: VerifyReport =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap()).unwrap();
    assert!(r.holds);
    assert_eq!(r.empirical_c, 2.0);
}

#[test]
fn stale_artifacts_are_removed() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        run(&example("example_3_3.json"), tmp.path(), None).exit_code,
        0
    );
    assert_eq!(
        run(&example("example_3_3_picard_fail.json"), tmp.path(), None).exit_code,
        2
    );
    assert!(!tmp.path().join("result.json").exists());
    assert!(tmp.path().join("diagnostic.json").exists());
}

#[test]
fn job_count_does_not_change_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(&example("example_3_3.json"), a.path(), Some(1));
    run(&example("example_3_3.json"), b.path(), Some(4));
    for f in ["result.json", "trace.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn catalog_subcommand() {
    let a = bin().arg("catalog").output().unwrap();
    let b = bin().arg("catalog").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("tychonoff_half") && text.contains("step"));
}

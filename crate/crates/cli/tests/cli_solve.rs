//! End-to-end checks of the installed binary: output formats, exit
//! codes, determinism, and budget behavior.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn loceq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loceq"))
        .args(args)
        .env_remove("LOCEQ_TIME_BUDGET")
        .env_remove("LOCEQ_STRETCH")
        .output()
        .expect("binary runs")
}

fn script(name: &str) -> String {
    corpus_dir().join(name).to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn text_output_is_the_equation_line() {
    let out = loceq(&["solve", &script("circle_midpoint_printed.lcs")]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "x^2 - 6x + y^2 - 4y + 9 = 0\n");
}

#[test]
fn json_output_carries_schema_equation_and_timings() {
    let out = loceq(&[
        "solve",
        &script("circle_midpoint_printed.lcs"),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["equation"], "x^2 - 6x + y^2 - 4y + 9 = 0");
    assert_eq!(v["degree"], 2);
    assert!(v["factors"].is_array());
    assert_eq!(v["superset_warning"], true);
    for key in ["parse_ms", "solve_ms", "total_ms"] {
        assert!(v["timings"][key].is_number(), "missing timings.{key}");
    }
}

#[test]
fn json_output_is_deterministic_modulo_timings() {
    let run = || {
        let out = loceq(&["solve", &script("pedal_strophoid.lcs"), "--format", "json"]);
        assert!(out.status.success());
        let mut v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        v.as_object_mut().unwrap().remove("timings");
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn svg_output_draws_paths_and_annotation() {
    let out = loceq(&[
        "solve",
        &script("circle_midpoint.lcs"),
        "--format",
        "svg",
        "--bbox",
        "-1,0,5,6",
        "--grid",
        "64",
    ]);
    assert!(out.status.success());
    let svg = stdout(&out);
    assert!(svg.starts_with("<svg xmlns"));
    assert!(svg.contains("<path "), "no curve drawn");
    assert!(svg.contains("x^2 - 4x + y^2 - 6y + 9 = 0"));
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn csv_output_has_header_and_numeric_rows() {
    let out = loceq(&[
        "solve",
        &script("circle_midpoint.lcs"),
        "--format",
        "csv",
        "--bbox",
        "-1,0,5,6",
        "--grid",
        "32",
    ]);
    assert!(out.status.success());
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,path_id"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 3, "bad row {line}");
        cols[0].parse::<f64>().unwrap();
        cols[1].parse::<f64>().unwrap();
        cols[2].parse::<usize>().unwrap();
        rows += 1;
    }
    assert!(rows > 8, "only {rows} vertices");
}

#[test]
fn trace_goal_prints_sampled_points() {
    let out = loceq(&["solve", &script("trace_locus.lcs"), "--samples", "12"]);
    assert!(out.status.success());
    let mut points = 0;
    for line in stdout(&out).lines() {
        if line.starts_with('#') {
            continue;
        }
        let (x, y) = line.split_once(' ').expect("x y pair");
        let x: f64 = x.parse().unwrap();
        let y: f64 = y.parse().unwrap();
        // every sample sits on (x-3)^2 + (y-2)^2 = 4
        let r = ((x - 3.0).powi(2) + (y - 2.0).powi(2) - 4.0).abs();
        assert!(r < 1e-6, "off-curve sample ({x}, {y})");
        points += 1;
    }
    assert!(points >= 4, "too few samples: {points}");
}

#[test]
fn parse_errors_exit_one_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.lcs");
    std::fs::write(&path, "A = (1, @)\nB = Midpoint[A]\n").unwrap();
    let out = loceq(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("1:9"), "missing position: {err}");
    assert!(err.contains("error"), "missing severity: {err}");
    assert!(stdout(&out).is_empty());
}

#[test]
fn missing_goal_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("goalless.lcs");
    std::fs::write(&path, "A = (0, 0)\n").unwrap();
    let out = loceq(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("goal"));
}

#[test]
fn usage_errors_exit_one() {
    let out = loceq(&["solve", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exhausted_step_budget_exits_two() {
    let out = loceq(&[
        "solve",
        &script("agnesi_full.lcs"),
        "--step-budget",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("budget exhausted"));
}

#[test]
fn time_budget_env_variable_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_loceq"))
        .args(["solve", &script("agnesi_full.lcs")])
        .env("LOCEQ_TIME_BUDGET", "0.000001")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budgets_are_monotone() {
    let run = |steps: &str| {
        let out = loceq(&["solve", &script("agnesi_full.lcs"), "--step-budget", steps]);
        (out.status.code(), stdout(&out))
    };
    let (tiny, _) = run("50");
    assert_eq!(tiny, Some(2), "tiny budget must exhaust");
    let (code_b, out_b) = run("500");
    assert_eq!(code_b, Some(0), "baseline budget solves");
    let (code_2b, out_2b) = run("1000");
    assert_eq!(code_2b, Some(0), "doubled budget still solves");
    assert_eq!(out_b, out_2b, "result must not depend on surplus budget");
}

#[test]
fn corpus_runner_reports_and_gates() {
    // A healthy pair passes.
    let dir = tempfile::tempdir().unwrap();
    for name in ["circle_midpoint", "midline"] {
        for ext in ["lcs", "expected"] {
            std::fs::copy(
                corpus_dir().join(format!("{name}.{ext}")),
                dir.path().join(format!("{name}.{ext}")),
            )
            .unwrap();
        }
    }
    let out = loceq(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let table = stdout(&out);
    assert_eq!(table.matches("PASS").count(), 2, "table: {table}");
    assert!(table.contains("2 passed, 0 failed, 0 skipped"));

    // Tampering with one expectation turns exactly one row red.
    std::fs::write(
        dir.path().join("midline.expected"),
        "mode: exact\nequation: y - 2\n",
    )
    .unwrap();
    let out = loceq(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let table = stdout(&out);
    assert_eq!(table.matches("FAIL").count(), 1, "table: {table}");
    assert!(table.contains("1 passed, 1 failed, 0 skipped"));
}

#[test]
fn empty_corpus_directory_passes_vacuously() {
    let dir = tempfile::tempdir().unwrap();
    let out = loceq(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 passed, 0 failed, 0 skipped"));
}

#[test]
fn stretch_entries_skip_unless_enabled() {
    let dir = tempfile::tempdir().unwrap();
    for ext in ["lcs", "expected"] {
        std::fs::copy(
            corpus_dir().join(format!("agnesi_full.{ext}")),
            dir.path().join(format!("agnesi_full.{ext}")),
        )
        .unwrap();
    }
    let out = loceq(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("skip"), "table: {}", stdout(&out));

    let out = loceq(&["corpus", dir.path().to_str().unwrap(), "--stretch"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).contains("1 passed, 0 failed, 0 skipped"),
        "table: {}",
        stdout(&out)
    );
}

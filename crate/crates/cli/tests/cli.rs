use std::process::Command as Process;

use hls_cli::report::{csv_string, emit_report, summarize, summary_json, ReportFormat};
use hls_cli::{config::parse_override, execute, parse_args, run, ReportRow, RunConfig};
use serde_json::{json, Value};

fn hls() -> Process {
    Process::new(env!("CARGO_BIN_EXE_hls"))
}

fn cfg(v: Value) -> RunConfig {
    RunConfig::from_value(v).unwrap()
}

#[test]
fn one_row_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![ReportRow::within("demo", json!({"x": 1}), 1.0, 1.0, 0.0)];
    let csv = dir.path().join("r.csv");
    emit_report(&rows, ReportFormat::Csv, &csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["experiment,param_json,measured,expected,tolerance,pass", r#"demo,"{""x"":1}",1,1,0,true"#]);
    let s = summarize(&rows);
    assert_eq!((s.total, s.failed), (1, 0));
    let json: Value = serde_json::from_str(&summary_json(&rows).unwrap()).unwrap();
    assert_eq!(json["total"], 1);
    assert_eq!(json["failed"], 0);
}

#[test]
fn empty_report_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(emit_report(&[], ReportFormat::Csv, &dir.path().join("x.csv")).is_err());
}

#[test]
fn worst_margin_tracks_failures() {
    let rows = vec![
        ReportRow::within("a", json!({}), 1.0, 1.0, 0.5),
        ReportRow::within("b", json!({}), 2.0, 1.0, 0.5),
    ];
    let s = summarize(&rows);
    assert_eq!(s.failed, 1);
    assert_eq!(s.failed_experiments, ["b"]);
    let worst = s.worst_margin.unwrap();
    assert_eq!(worst.experiment, "b");
    assert!((worst.margin + 0.5).abs() < 1e-15);
}

#[test]
fn overrides_parse_as_json_then_string() {
    assert_eq!(parse_override("8"), json!(8));
    assert_eq!(parse_override("[1,2]"), json!([1, 2]));
    assert_eq!(parse_override("omega_a"), json!("omega_a"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"command": "constraints", "p": 2.0, "q": 4.0, "beta": 0.25}"#).unwrap();
    let c = parse_args(["hls", "--config", path.to_str().unwrap(), "--q", "8"]).unwrap();
    assert_eq!(c.q, Some(8.0));
    assert_eq!(c.command.unwrap().name(), "constraints");
    let c = parse_args(["hls", "kernel-eval", "--config", path.to_str().unwrap(), "--kernel", "omega_a"]).unwrap();
    assert_eq!(c.command.unwrap().name(), "kernel-eval");
    assert!(parse_args(["hls", "kernel-eval", "--q"]).is_err());
    assert!(parse_args(["hls", "kernel-eval", "--unknown_key", "1"]).is_err());
}

#[test]
fn kernel_eval_prints_value() {
    let out = hls().args(["kernel-eval", "--n", "1", "--alpha", "0.5", "--beta", "0.25", "--point", "[2,1,1]"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value: f64 = stdout.lines().nth(1).unwrap().rsplit(',').nth(3).unwrap().parse().unwrap();
    assert!((value - 0.63057).abs() < 5e-5, "{value}");
}

#[test]
fn homogeneity_default_passes() {
    let out = hls().arg("homogeneity").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = execute(&cfg(json!({"command": "homogeneity"}))).unwrap();
    assert!(rows.iter().all(|r| r.pass && r.measured <= 1e-9));
}

#[test]
fn necessity_flags_divergent_pair() {
    let out = hls().args(["necessity", "--alpha", "0.5", "--beta", "0.25", "--p", "2", "--q", "4", "--N", "7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let rows = execute(&cfg(json!({"command": "necessity", "q": 4.0, "N": 7}))).unwrap();
    let fit = rows.iter().find(|r| r.experiment == "necessity:fit").unwrap();
    assert!(fit.pass && (fit.measured - 0.5).abs() < 0.1);
    assert!(!rows.iter().find(|r| r.experiment == "necessity:bounded").unwrap().pass);
    assert!(rows.iter().find(|r| r.experiment == "necessity:line").unwrap().pass);
}

#[test]
fn necessity_on_line_passes() {
    let rows = execute(&cfg(json!({"command": "necessity", "pairs": [[2.0, 8.0]], "N": 7}))).unwrap();
    assert!(rows.iter().all(|r| r.pass), "{rows:?}");
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        vec!["nonsense"],
        vec!["kernel-eval", "--point", "[1,2]"],
        vec!["scaling-fit", "--deltas", "[1,2]"],
        vec!["scaling-fit", "--deltas", "[0.5,1,2]"],
        vec!["apply", "--p", "0.5"],
        vec!["constraints", "--kernel", "omega_a"],
        vec!["proof-chain", "--theta", "0.3"],
        vec!["apply", "--alpha", "2.0"],
        vec!["kernel-eval", "--samples", "0"],
    ] {
        let out = hls().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?} computed before failing");
    }
}

#[test]
fn unwritable_output_exits_2() {
    let out = hls().args(["constraints", "--output", "/nonexistent-dir/r.csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let c = cfg(json!({"command": "dominance", "samples": 2000, "seed": 7, "output": path}));
        assert_eq!(run(&c).unwrap().exit_code, 0);
        outputs.push((std::fs::read(&path).unwrap(), std::fs::read(path.with_extension("summary.json")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let other = csv_string(&execute(&cfg(json!({"command": "dominance", "samples": 2000, "seed": 8}))).unwrap()).unwrap();
    assert_ne!(String::from_utf8(outputs[0].0.clone()).unwrap(), other);
}

#[test]
fn thread_count_does_not_change_reports() {
    let c = cfg(json!({"command": "probe-norm", "N": 7, "family": "single", "pairs": [[2.0, 8.0], [2.0, 4.0]]}));
    let one = hls_core::parallel::with_threads(1, || csv_string(&execute(&c).unwrap()).unwrap());
    let four = hls_core::parallel::with_threads(4, || csv_string(&execute(&c).unwrap()).unwrap());
    assert_eq!(one, four);
    let env = |t: &str| {
        hls().env("HLS_THREADS", t).args(["scaling-fit", "--N", "5"]).output().unwrap().stdout
    };
    assert_eq!(env("1"), env("3"));
}

#[test]
fn apply_reuses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("out.grid");
    let c = cfg(json!({"command": "apply", "N": 5, "cache": cache}));
    let first = execute(&c).unwrap();
    assert!(cache.exists());
    let second = execute(&c).unwrap();
    assert_eq!(first[0].params["cache_hit"], json!(false));
    assert_eq!(second[0].params["cache_hit"], json!(true));
    assert_eq!(first[1].measured, second[1].measured);
    // A different kernel must not read the stale cache.
    let c2 = cfg(json!({"command": "apply", "N": 5, "cache": cache, "beta": 0.3}));
    let third = execute(&c2).unwrap();
    assert_eq!(third[0].params["cache_hit"], json!(false));
    assert!(third.iter().all(|r| r.pass));
}

#[test]
fn classical_plain_rule_misses_tolerance() {
    let rows = execute(&cfg(json!({"command": "classical-hls", "rule": "plain"}))).unwrap();
    let finest: Vec<&ReportRow> = rows.iter().filter(|r| r.experiment == "classical-hls:finest").collect();
    // Far from the support the plain rule is accurate; at the singular point it is not.
    assert!(finest[0].pass);
    assert!(!finest[1].pass);
    let corrected = execute(&cfg(json!({"command": "classical-hls"}))).unwrap();
    assert!(corrected.iter().all(|r| r.pass));
}

#[test]
fn constraints_report_flags() {
    let rows = execute(&cfg(json!({"command": "constraints", "theta": 0.05}))).unwrap();
    let theta = rows.iter().find(|r| r.experiment == "constraints:theta").unwrap();
    assert!(!theta.pass);
    let ab = execute(&cfg(json!({"command": "constraints", "kernel": "omega_ab", "a": 0.5, "b": 0.25}))).unwrap();
    assert_eq!(ab.len(), 3);
    assert!(ab.iter().all(|r| r.pass));
}

#[test]
fn remaining_commands_run() {
    for v in [
        json!({"command": "lambda-bracket", "samples": 1000}),
        json!({"command": "proof-chain", "N": 9, "probes": 2}),
        json!({"command": "mu-sweep", "N": 5, "mus": [0.0, 1.0]}),
        json!({"command": "kernel-eval", "kernel": "majorant"}),
        json!({"command": "homogeneity", "kernel": "omega_ab", "samples": 50}),
    ] {
        let rows = execute(&cfg(v.clone())).unwrap();
        assert!(!rows.is_empty() && rows.iter().all(|r| r.pass), "{v}: {rows:?}");
    }
}

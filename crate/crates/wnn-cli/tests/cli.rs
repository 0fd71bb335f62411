//! End-to-end tests of the `wnn` binary: exit codes, output formats
//! and round-trips, thread-count determinism, and config precedence.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wnn_cli::output;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_wnn")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env_remove("WNN_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Monthly series with trend and seasonality, labeled from 2015-01.
fn write_series(dir: &Path, t: usize) -> PathBuf {
    let mut csv = String::from("label,value\n");
    for i in 0..t {
        let v = 100.0 + 2.0 * i as f64 + 12.0 * (2.0 * std::f64::consts::PI * i as f64 / 12.0).sin();
        csv.push_str(&format!("{:04}-{:02},{v}\n", 2015 + i / 12, i % 12 + 1));
    }
    let path = dir.join("series.csv");
    std::fs::write(&path, csv).unwrap();
    path
}

#[test]
fn exit_codes_separate_failure_classes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), 72);
    let input = input.to_str().unwrap();

    // 0: success and help/version.
    assert_eq!(run(&["tune", "--input", input, "--horizon", "2"]).status.code(), Some(0));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));

    // 1: usage errors, from clap and from validation.
    assert_eq!(run(&["tune"]).status.code(), Some(1));
    assert_eq!(run(&["tune", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(
        run(&["tune", "--input", input, "--horizon", "2", "--horizons", "1..3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["tune", "--input", input, "--horizon", "2", "--test-fraction", "0.2", "--folds", "4"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["forecast", "--input", input, "--horizon", "2", "--p", "2", "--k", "1"])
            .status
            .code(),
        Some(1),
        "forecast without an explicit variant is a usage error"
    );

    // 2: data errors.
    assert_eq!(
        run(&["tune", "--input", "/no/such/file.csv", "--horizon", "2"]).status.code(),
        Some(2)
    );
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "label,value\n2015-01,not_a_number\n").unwrap();
    assert_eq!(
        run(&["tune", "--input", bad.to_str().unwrap(), "--horizon", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["tune", "--input", input, "--column", "nope", "--horizon", "2"]).status.code(),
        Some(2)
    );

    // 3: structurally infeasible requests.
    assert_eq!(
        run(&["tune", "--input", input, "--horizon", "3", "--folds", "50"]).status.code(),
        Some(3)
    );
}

#[test]
fn tune_csv_output_round_trips_through_reader() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), 72);
    let out_path = dir.path().join("bench.csv");
    let status = run(&[
        "tune",
        "--input",
        input.to_str().unwrap(),
        "--horizons",
        "1..3",
        "--variant",
        "both",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let records = output::bench_from_csv(&text).unwrap();
    assert_eq!(records.len(), 6, "3 horizons x 2 variants");
    for r in &records {
        assert!(r.mape_star.is_finite() && r.mape_star >= 0.0);
        assert!(r.p_star >= 1 && r.k_star >= 1);
        assert!((1..=3).contains(&r.horizon));
    }
    // Emitting the parsed records reproduces the file byte for byte.
    assert_eq!(output::bench_to_csv(&records), text);
}

#[test]
fn tune_json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), 72);
    let out = run(&[
        "tune",
        "--input",
        input.to_str().unwrap(),
        "--horizon",
        "2",
        "--variant",
        "cpto",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let records = output::bench_from_json(&stdout(&out)).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].variant, "cpto");
    assert_eq!(records[0].horizon, 2);
}

/// Numeric columns must not depend on the worker pool size; only the
/// timing column may differ between runs.
#[test]
fn tune_and_compare_are_thread_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), 84);
    let input = input.to_str().unwrap();

    let strip_ct = |text: &str| {
        let records = output::bench_from_csv(text).unwrap();
        records
            .into_iter()
            .map(|r| (r.horizon, r.i_sets, r.variant, r.p_star, r.k_star, r.mape_star.to_bits()))
            .collect::<Vec<_>>()
    };
    let tune = |threads: &str| {
        let out = run(&["tune", "--input", input, "--horizons", "1..4", "--threads", threads]);
        assert_eq!(out.status.code(), Some(0));
        strip_ct(&stdout(&out))
    };
    let base = tune("1");
    assert_eq!(tune("2"), base);
    assert_eq!(tune("8"), base);

    // The compare wide table carries no timing at all: byte-identical.
    let compare = |threads: &str| {
        let out = run(&["compare", "--input", input, "--horizon", "4", "--threads", threads]);
        assert_eq!(out.status.code(), Some(0));
        stdout(&out)
    };
    let base = compare("1");
    assert_eq!(compare("4"), base);
}

#[test]
fn threads_env_var_is_a_fallback_not_an_override() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), 72);
    let input = input.to_str().unwrap();

    // Env alone steers the run; a bad value is then a usage error.
    let out = Command::new(bin())
        .args(["tune", "--input", input, "--horizon", "2"])
        .env("WNN_THREADS", "junk")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // An explicit flag wins over a bad env value.
    let out = Command::new(bin())
        .args(["tune", "--input", input, "--horizon", "2", "--threads", "1"])
        .env("WNN_THREADS", "junk")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_file_fills_gaps_but_loses_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), 72);
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        format!(
            "input = {}\nhorizon = 2\nvariant = fpto\nkmax = 3\n",
            input.display()
        ),
    )
    .unwrap();

    let out = run(&["tune", "--config", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let records = output::bench_from_csv(&stdout(&out)).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].variant, "fpto");
    assert!(records[0].k_star <= 3);

    let out = run(&["tune", "--config", conf.to_str().unwrap(), "--variant", "cpto"]);
    let records = output::bench_from_csv(&stdout(&out)).unwrap();
    assert_eq!(records[0].variant, "cpto", "flag overrides config file");
}

#[test]
fn preprocess_flags_planted_spike_and_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("value\n");
    let mut values: Vec<f64> = (0..20).map(|i| 10.0 + (i % 3) as f64).collect();
    values[9] = 500.0;
    for v in &values {
        csv.push_str(&format!("{v}\n"));
    }
    let input = dir.path().join("spiky.csv");
    std::fs::write(&input, csv).unwrap();
    let out_path = dir.path().join("adjusted.csv");

    let out = run(&[
        "preprocess",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(stderr.contains("position 10"), "1-based flag report: {stderr}");

    let reloaded = wnn_forecast::load_csv(
        &out_path,
        &wnn_forecast::ColumnSpec::Name("value".into()),
        true,
    )
    .unwrap();
    assert_eq!(reloaded.len(), 20);
    assert!(reloaded.values()[9] < 20.0, "spike replaced");

    // JSON variant carries the flag record itself.
    let out = run(&[
        "preprocess",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let parsed = output::preprocess_from_json(&stdout(&out)).unwrap();
    assert_eq!(parsed.flagged_indices, vec![10]);
    assert_eq!(parsed.original_values, vec![500.0]);
}

#[test]
fn forecast_extends_monthly_labels() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), 72); // ends at 2020-12
    let out = run(&[
        "forecast",
        "--input",
        input.to_str().unwrap(),
        "--labels",
        "label",
        "--variant",
        "cpto",
        "--horizon",
        "3",
        "--p",
        "2",
        "--k",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed = output::forecast_from_csv(&stdout(&out)).unwrap();
    assert_eq!(parsed.labels, vec!["2021-01", "2021-02", "2021-03"]);
    assert_eq!(parsed.forecasts.len(), 3);
    for f in &parsed.forecasts {
        assert!(f.is_finite());
    }
}

#[test]
fn compare_writes_wide_and_long_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), 72);
    let out_path = dir.path().join("cmp.csv");
    let out = run(&[
        "compare",
        "--input",
        input.to_str().unwrap(),
        "--horizon",
        "3",
        "--methods",
        "cpto,naive",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let wide = std::fs::read_to_string(&out_path).unwrap();
    assert!(wide.starts_with("horizon,i_sets,cpto_wnn,seasonal_naive\n"), "{wide}");

    let long_path = dir.path().join("cmp_long.csv");
    let long = std::fs::read_to_string(&long_path).unwrap();
    assert!(long.starts_with("horizon,method,mape\n"));
    assert!(long.contains("3,cpto_wnn,"));
    assert!(long.contains("3,seasonal_naive,"));
}

#[test]
fn compare_rejects_unknown_method() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), 72);
    let out = run(&[
        "compare",
        "--input",
        input.to_str().unwrap(),
        "--horizon",
        "2",
        "--methods",
        "cpto,arima",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

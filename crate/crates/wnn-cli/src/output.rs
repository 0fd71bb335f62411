//! Result records, their CSV/JSON emission, and the readers that
//! round-trip every emitted file back into the emitting structure.
//!
//! Floats are written with Rust's shortest-roundtrip formatting, so
//! parsing an emitted file reproduces the in-memory values exactly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wnn_forecast::{ComparisonRow, MethodOutcome};

use crate::CliError;

/// One tuning run: horizon, fold count, layout, winner and timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub horizon: usize,
    pub i_sets: usize,
    pub variant: String,
    pub p_star: usize,
    pub k_star: usize,
    pub mape_star: f64,
    /// Wall-clock of the grid search, rounded to hundredths.
    pub ct_seconds: f64,
}

/// Rounds to two decimals; applied once at record construction so the
/// stored value and every emission agree.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn bench_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from("horizon,i_sets,variant,p_star,k_star,mape_star,ct_seconds\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.horizon, r.i_sets, r.variant, r.p_star, r.k_star, r.mape_star, r.ct_seconds
        ));
    }
    out
}

pub fn bench_from_csv(text: &str) -> Result<Vec<BenchRecord>, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::data("empty benchmark file".into()))?;
    if header != "horizon,i_sets,variant,p_star,k_star,mape_star,ct_seconds" {
        return Err(CliError::data(format!("unexpected header '{header}'")));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(CliError::data(format!(
                "row {}: expected 7 fields, got {}",
                i + 2,
                fields.len()
            )));
        }
        let parse_err = |col: &str| CliError::data(format!("row {}: bad {col}", i + 2));
        records.push(BenchRecord {
            horizon: fields[0].parse().map_err(|_| parse_err("horizon"))?,
            i_sets: fields[1].parse().map_err(|_| parse_err("i_sets"))?,
            variant: fields[2].to_string(),
            p_star: fields[3].parse().map_err(|_| parse_err("p_star"))?,
            k_star: fields[4].parse().map_err(|_| parse_err("k_star"))?,
            mape_star: fields[5].parse().map_err(|_| parse_err("mape_star"))?,
            ct_seconds: fields[6].parse().map_err(|_| parse_err("ct_seconds"))?,
        });
    }
    Ok(records)
}

pub fn bench_to_json(records: &[BenchRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("serializable");
    s.push('\n');
    s
}

pub fn bench_from_json(text: &str) -> Result<Vec<BenchRecord>, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::data(format!("bad benchmark JSON: {e}")))
}

/// Adjusted series plus the outlier pass record, for JSON emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessOutput {
    pub flagged_indices: Vec<usize>,
    pub original_values: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

pub fn preprocess_to_json(out: &PreprocessOutput) -> String {
    let mut s = serde_json::to_string_pretty(out).expect("serializable");
    s.push('\n');
    s
}

pub fn preprocess_from_json(text: &str) -> Result<PreprocessOutput, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::data(format!("bad preprocess JSON: {e}")))
}

/// Adjusted series as CSV that `load_csv` accepts back.
pub fn series_to_csv(values: &[f64], labels: Option<&[String]>) -> String {
    let mut out = String::new();
    match labels {
        Some(labels) => {
            out.push_str("label,value\n");
            for (l, v) in labels.iter().zip(values.iter()) {
                out.push_str(&format!("{l},{v}\n"));
            }
        }
        None => {
            out.push_str("value\n");
            for v in values {
                out.push_str(&format!("{v}\n"));
            }
        }
    }
    out
}

/// Future forecasts with their extrapolated labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastOutput {
    pub labels: Vec<String>,
    pub forecasts: Vec<f64>,
}

pub fn forecast_to_csv(out: &ForecastOutput) -> String {
    let mut s = String::from("label,forecast\n");
    for (l, f) in out.labels.iter().zip(out.forecasts.iter()) {
        s.push_str(&format!("{l},{f}\n"));
    }
    s
}

pub fn forecast_from_csv(text: &str) -> Result<ForecastOutput, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some("label,forecast") => {}
        other => return Err(CliError::data(format!("unexpected header {other:?}"))),
    }
    let mut labels = Vec::new();
    let mut forecasts = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (l, f) = line
            .split_once(',')
            .ok_or_else(|| CliError::data(format!("row {}: expected 2 fields", i + 2)))?;
        labels.push(l.to_string());
        forecasts.push(
            f.parse()
                .map_err(|_| CliError::data(format!("row {}: bad forecast", i + 2)))?,
        );
    }
    Ok(ForecastOutput { labels, forecasts })
}

pub fn forecast_to_json(out: &ForecastOutput) -> String {
    let mut s = serde_json::to_string_pretty(out).expect("serializable");
    s.push('\n');
    s
}

pub fn forecast_from_json(text: &str) -> Result<ForecastOutput, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::data(format!("bad forecast JSON: {e}")))
}

/// One method cell of a comparison row, flattened for emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareCellOut {
    pub label: String,
    /// Mean MAPE; absent when the method failed on these folds.
    pub mape: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub ct_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_star: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_star: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRowOut {
    pub horizon: usize,
    pub i_sets: usize,
    pub cells: Vec<CompareCellOut>,
}

pub fn compare_rows(rows: &[ComparisonRow]) -> Vec<CompareRowOut> {
    rows.iter()
        .map(|row| CompareRowOut {
            horizon: row.horizon_n,
            i_sets: row.i_sets,
            cells: row
                .cells
                .iter()
                .map(|c| {
                    let (mape, failure) = match &c.outcome {
                        MethodOutcome::Mape(m) => (Some(*m), None),
                        MethodOutcome::Failure(msg) => (None, Some(msg.clone())),
                    };
                    CompareCellOut {
                        label: c.label.clone(),
                        mape,
                        failure,
                        ct_seconds: round2(c.wall_clock_seconds),
                        p_star: c.tuned.map(|t| t.0),
                        k_star: c.tuned.map(|t| t.1),
                    }
                })
                .collect(),
        })
        .collect()
}

/// Wide table: one row per horizon, one MAPE column per method, with
/// failed cells holding the string "failure".
pub fn compare_to_wide_csv(rows: &[CompareRowOut]) -> Result<String, CliError> {
    let first = rows
        .first()
        .ok_or_else(|| CliError::data("no comparison rows".into()))?;
    let labels: Vec<&str> = first.cells.iter().map(|c| c.label.as_str()).collect();
    for row in rows {
        let got: Vec<&str> = row.cells.iter().map(|c| c.label.as_str()).collect();
        if got != labels {
            return Err(CliError::data("method columns differ across rows".into()));
        }
    }
    let mut out = format!("horizon,i_sets,{}\n", labels.join(","));
    for row in rows {
        out.push_str(&format!("{},{}", row.horizon, row.i_sets));
        for c in &row.cells {
            match c.mape {
                Some(m) => out.push_str(&format!(",{m}")),
                None => out.push_str(",failure"),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Long plot-ready table: (horizon, method, mape) triples.
pub fn compare_to_long_csv(rows: &[CompareRowOut]) -> String {
    let mut out = String::from("horizon,method,mape\n");
    for row in rows {
        for c in &row.cells {
            match c.mape {
                Some(m) => out.push_str(&format!("{},{},{m}\n", row.horizon, c.label)),
                None => out.push_str(&format!("{},{},failure\n", row.horizon, c.label)),
            }
        }
    }
    out
}

pub fn compare_to_json(rows: &[CompareRowOut]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("serializable");
    s.push('\n');
    s
}

pub fn compare_from_json(text: &str) -> Result<Vec<CompareRowOut>, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::data(format!("bad comparison JSON: {e}")))
}

/// Sibling path for the long-format companion file: stem + "_long".
pub fn long_sibling(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_long.{ext}"))
}

/// Writes to the path, or stdout when no path is configured.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, contents)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

//! Core series representation, CSV ingestion, the MAPE accuracy metric,
//! and rolling-origin train/test splitting.
//!
//! Positions reported to callers (flagged outliers, split boundaries,
//! neighbor candidates) are 1-based, matching the usual time-series
//! convention x_1..x_T. Internally everything is 0-based slices.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// An ordered univariate series of finite real observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    period: Option<usize>,
    labels: Option<Vec<String>>,
}

impl Series {
    /// Builds a series, validating that it is non-empty and finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { position: i + 1 });
            }
        }
        Ok(Series {
            values,
            period: None,
            labels: None,
        })
    }

    /// Attaches the number of observations per seasonal cycle (e.g. 12
    /// for monthly data).
    pub fn with_period(mut self, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidArgument("period must be >= 1".into()));
        }
        self.period = Some(period);
        Ok(self)
    }

    /// Attaches row labels (timestamps or names), one per observation.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.values.len() {
            return Err(Error::LabelLengthMismatch {
                labels: labels.len(),
                values: self.values.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Number of observations T.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// A new series holding the first `len` observations, keeping period
    /// and label metadata.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "prefix length {len} out of range 1..={}",
                self.values.len()
            )));
        }
        Ok(Series {
            values: self.values[..len].to_vec(),
            period: self.period,
            labels: self.labels.as_ref().map(|l| l[..len].to_vec()),
        })
    }
}

/// Selects a CSV column either by header name or by 0-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSpec {
    Name(String),
    Index(usize),
}

impl ColumnSpec {
    /// Parses a user-supplied selector: digits mean a 0-based index,
    /// anything else is a header name.
    pub fn parse(s: &str) -> ColumnSpec {
        match s.trim().parse::<usize>() {
            Ok(i) => ColumnSpec::Index(i),
            Err(_) => ColumnSpec::Name(s.trim().to_string()),
        }
    }
}

impl fmt::Display for ColumnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSpec::Name(n) => write!(f, "{n}"),
            ColumnSpec::Index(i) => write!(f, "{i}"),
        }
    }
}

/// Loads one value column from a CSV file (comma-delimited).
pub fn load_csv(path: impl AsRef<Path>, value_column: &ColumnSpec, has_header: bool) -> Result<Series> {
    load_csv_full(path, value_column, None, has_header, b',')
}

/// Loads a value column plus an optional label column, with a custom
/// delimiter. This is the full-featured entry point behind [`load_csv`].
pub fn load_csv_full(
    path: impl AsRef<Path>,
    value_column: &ColumnSpec,
    label_column: Option<&ColumnSpec>,
    has_header: bool,
    delimiter: u8,
) -> Result<Series> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::FileNotFound(PathBuf::from(path)));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .delimiter(delimiter)
        .flexible(true)
        .from_path(path)?;

    let resolve = |spec: &ColumnSpec, headers: Option<&csv::StringRecord>| -> Result<usize> {
        match spec {
            ColumnSpec::Index(i) => Ok(*i),
            ColumnSpec::Name(name) => {
                let headers = headers.ok_or_else(|| Error::ColumnNotFound(name.clone()))?;
                headers
                    .iter()
                    .position(|h| h.trim() == name)
                    .ok_or_else(|| Error::ColumnNotFound(name.clone()))
            }
        }
    };

    let headers = if has_header {
        Some(reader.headers()?.clone())
    } else {
        None
    };
    let value_idx = resolve(value_column, headers.as_ref())?;
    let label_idx = label_column
        .map(|c| resolve(c, headers.as_ref()))
        .transpose()?;

    let mut values = Vec::new();
    let mut labels = Vec::new();
    // 1-based data row numbers in error reports; the header is row 0.
    let first_row = if has_header { 2 } else { 1 };
    for (offset, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() == 1 && record[0].trim().is_empty() {
            continue; // blank line
        }
        let row = first_row + offset;
        let cell = record
            .get(value_idx)
            .ok_or_else(|| Error::ColumnNotFound(value_column.to_string()))?;
        let parsed: f64 = cell.trim().parse().map_err(|_| Error::ParseError {
            row,
            column: value_column.to_string(),
            value: cell.to_string(),
        })?;
        values.push(parsed);
        if let Some(li) = label_idx {
            let label = record
                .get(li)
                .ok_or_else(|| Error::ColumnNotFound(format!("{li}")))?;
            labels.push(label.trim().to_string());
        }
    }

    let series = Series::new(values)?;
    if label_idx.is_some() {
        series.with_labels(labels)
    } else {
        Ok(series)
    }
}

/// MAPE plus the per-point relative error terms it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    /// 100/n * sum of per-point errors.
    pub mape_percent: f64,
    /// |y - yhat| / |y| for each point, in series order.
    pub per_point_errors: Vec<f64>,
}

/// Mean absolute percentage error of `predicted` against `actual`.
///
/// Fails loudly on a zero actual value rather than skipping the point.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<AccuracyReport> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::InvalidArgument("MAPE of empty sequences".into()));
    }
    let mut per_point_errors = Vec::with_capacity(actual.len());
    for (i, (&y, &yhat)) in actual.iter().zip(predicted.iter()).enumerate() {
        if y == 0.0 {
            return Err(Error::ZeroActualValue { position: i + 1 });
        }
        per_point_errors.push(((y - yhat) / y).abs());
    }
    // Deterministic left-to-right summation.
    let sum: f64 = per_point_errors.iter().sum();
    Ok(AccuracyReport {
        mape_percent: 100.0 / actual.len() as f64 * sum,
        per_point_errors,
    })
}

/// One rolling-origin fold: the training prefix and its n-point test block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    /// Length of the training prefix (train = values[..train_len]).
    pub train_len: usize,
    /// Test block, 0-based half-open range immediately after the prefix.
    pub test_range: std::ops::Range<usize>,
}

/// The ordered folds used by the modified rolling-origin cross-validation.
///
/// Fold i (1-based) trains on x_1..x_{T-i*n} and tests on the n points
/// that follow, so the union of the test blocks is the last I*n
/// observations of the series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub horizon_n: usize,
    pub num_sets_i: usize,
    pub splits: Vec<Split>,
}

/// Builds the rolling-origin folds for horizon `n` and `i_sets` training
/// sets. Requires T - I*n >= n + 2, the shortest prefix the forecasting
/// recursion can process.
pub fn make_splits(series: &Series, n: usize, i_sets: usize) -> Result<SplitPlan> {
    if n == 0 || i_sets == 0 {
        return Err(Error::InvalidArgument("n and I must be >= 1".into()));
    }
    let t = series.len();
    let needed = i_sets
        .checked_mul(n)
        .and_then(|x| x.checked_add(n + 2))
        .ok_or_else(|| Error::InvalidArgument("n*I overflow".into()))?;
    if t < needed {
        return Err(Error::InsufficientData {
            reason: format!("need T >= I*n + n + 2 = {needed}, got T = {t} (n = {n}, I = {i_sets})"),
        });
    }
    let splits = (1..=i_sets)
        .map(|i| {
            let train_len = t - i * n;
            Split {
                train_len,
                test_range: train_len..train_len + n,
            }
        })
        .collect();
    Ok(SplitPlan {
        horizon_n: n,
        num_sets_i: i_sets,
        splits,
    })
}

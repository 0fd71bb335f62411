//! Preprocessing stages applied before neighbor search: additive-spike
//! outlier adjustment, the Box-Cox variance-stabilizing transform with
//! automatic lambda selection, and lag-1 differencing with its inverse.

use crate::error::{Error, Result};
use crate::series::Series;

/// Outcome of the outlier pass: the adjusted series plus what was changed.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    pub adjusted_series: Series,
    /// 1-based positions that were flagged, in pass order. Always within
    /// [4, T-3]; the first and last three observations are never touched.
    pub flagged_indices: Vec<usize>,
    /// Values that stood at the flagged positions before replacement.
    pub original_values: Vec<f64>,
}

fn median3(a: f64, b: f64, c: f64) -> f64 {
    let mut v = [a, b, c];
    v.sort_unstable_by(f64::total_cmp);
    v[1]
}

/// Detects additive spikes and replaces them with the mean of their
/// immediate neighbors.
///
/// A point x_i (i = 4..T-3) is flagged when |x_i| is at least four times
/// the larger of |median(x_{i-3..i-1})| and |median(x_{i+1..i+3})|, and is
/// replaced by (x_{i-1} + x_{i+1})/2 immediately, so later tests in the
/// same pass see the replacement. Series shorter than 7 are returned
/// unchanged.
pub fn detect_adjust_outliers(series: &Series) -> OutlierReport {
    let mut x = series.values().to_vec();
    let t = x.len();
    let mut flagged_indices = Vec::new();
    let mut original_values = Vec::new();
    if t >= 7 {
        for i in 3..=t - 4 {
            let m_before = median3(x[i - 3], x[i - 2], x[i - 1]);
            let m_after = median3(x[i + 1], x[i + 2], x[i + 3]);
            let threshold = 4.0 * m_before.abs().max(m_after.abs());
            if x[i].abs() >= threshold {
                flagged_indices.push(i + 1);
                original_values.push(x[i]);
                x[i] = (x[i - 1] + x[i + 1]) / 2.0;
            }
        }
    }
    let adjusted_series = Series::new(x)
        .expect("adjusted series is a finite-arithmetic image of a valid series");
    let adjusted_series = match (series.period(), series.labels()) {
        (Some(p), _) => {
            let s = adjusted_series.with_period(p).expect("period was valid");
            match series.labels() {
                Some(l) => s.with_labels(l.to_vec()).expect("label count unchanged"),
                None => s,
            }
        }
        (None, Some(l)) => adjusted_series
            .with_labels(l.to_vec())
            .expect("label count unchanged"),
        (None, None) => adjusted_series,
    };
    OutlierReport {
        adjusted_series,
        flagged_indices,
        original_values,
    }
}

/// Box-Cox transform of a single positive value.
pub fn boxcox(x: f64, lambda: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::NonPositiveValue { position: 1 });
    }
    if lambda == 0.0 {
        Ok(x.ln())
    } else {
        Ok((x.powf(lambda) - 1.0) / lambda)
    }
}

/// Inverse Box-Cox. Fails when lambda*y + 1 <= 0, i.e. when y has left
/// the transform's range.
pub fn inv_boxcox(y: f64, lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        Ok(y.exp())
    } else {
        let base = lambda * y + 1.0;
        if base <= 0.0 {
            return Err(Error::DomainError { value: y });
        }
        Ok(base.powf(1.0 / lambda))
    }
}

/// Box-Cox over a slice; error positions are 1-based.
pub fn boxcox_vec(x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v <= 0.0 {
                Err(Error::NonPositiveValue { position: i + 1 })
            } else {
                boxcox(v, lambda)
            }
        })
        .collect()
}

/// Inverse Box-Cox over a slice.
pub fn inv_boxcox_vec(y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    y.iter().map(|&v| inv_boxcox(v, lambda)).collect()
}

/// The lambda chosen for a series and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxCoxParams {
    pub lambda: f64,
    /// 1-based inclusive range of observations the estimate used, or None
    /// when the value was supplied rather than fitted.
    pub fitted_on: Option<(usize, usize)>,
    /// True when every block had zero variance, making the criterion flat;
    /// lambda defaults to 1 in that case.
    pub degenerate: bool,
}

impl BoxCoxParams {
    /// A caller-supplied lambda, bypassing estimation.
    pub fn fixed(lambda: f64) -> Self {
        BoxCoxParams {
            lambda,
            fitted_on: None,
            degenerate: false,
        }
    }
}

fn sample_mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_std(v: &[f64]) -> f64 {
    let m = sample_mean(v);
    let ss: f64 = v.iter().map(|u| (u - m) * (u - m)).sum();
    (ss / (v.len() - 1) as f64).sqrt()
}

/// Selects a Box-Cox lambda by minimizing the coefficient of variation of
/// the block ratios s_b / m_b^(1-lambda).
///
/// The series is cut into consecutive non-overlapping blocks of length
/// `period` (a trailing partial block is dropped); each block contributes
/// its sample mean m_b and sample standard deviation s_b. The search is a
/// dense grid over `search_interval` at resolution 0.01, with grid points
/// aligned to exact multiples of the step so that lambda = 0 is
/// representable. Ties keep the smaller lambda.
pub fn select_lambda_guerrero(
    series: &Series,
    period: usize,
    search_interval: (f64, f64),
) -> Result<BoxCoxParams> {
    if period == 0 {
        return Err(Error::InvalidArgument("period must be >= 1".into()));
    }
    let (lo, hi) = search_interval;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "invalid search interval [{lo}, {hi}]"
        )));
    }
    let x = series.values();
    let t = x.len();
    if t < 2 * period {
        return Err(Error::TooShort {
            required: 2 * period,
            actual: t,
        });
    }
    for (i, &v) in x.iter().enumerate() {
        if v <= 0.0 {
            return Err(Error::NonPositiveValue { position: i + 1 });
        }
    }

    let num_blocks = t / period;
    let used = num_blocks * period;
    let mut means = Vec::with_capacity(num_blocks);
    let mut stds = Vec::with_capacity(num_blocks);
    for b in 0..num_blocks {
        let block = &x[b * period..(b + 1) * period];
        means.push(sample_mean(block));
        stds.push(sample_std(block));
    }

    if stds.iter().all(|&s| s == 0.0) {
        return Ok(BoxCoxParams {
            lambda: 1.0,
            fitted_on: Some((1, used)),
            degenerate: true,
        });
    }

    const STEP: f64 = 1e-2;
    let m_lo = ((lo - 1e-12) / STEP).ceil() as i64;
    let m_hi = ((hi + 1e-12) / STEP).floor() as i64;
    let candidates: Vec<f64> = if m_lo > m_hi {
        vec![(lo + hi) / 2.0]
    } else {
        (m_lo..=m_hi).map(|m| m as f64 * STEP).collect()
    };

    let mut best_lambda = candidates[0];
    let mut best_cv = f64::INFINITY;
    let mut ratios = vec![0.0; num_blocks];
    for &lambda in &candidates {
        for b in 0..num_blocks {
            ratios[b] = stds[b] / means[b].powf(1.0 - lambda);
        }
        let mean_r = sample_mean(&ratios);
        let cv = sample_std(&ratios) / mean_r;
        if cv < best_cv {
            best_cv = cv;
            best_lambda = lambda;
        }
    }

    Ok(BoxCoxParams {
        lambda: best_lambda,
        fitted_on: Some((1, used)),
        degenerate: false,
    })
}

/// A lag-1 differenced sequence together with the level needed to undo it.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffState {
    /// h_t = g_{t+1} - g_t, one element shorter than the source.
    pub differenced: Vec<f64>,
    /// Last value of the source, the level forecasting continues from.
    pub base_level: f64,
}

/// First differences at lag 1. Needs at least two values.
pub fn difference(values: &[f64]) -> Result<DiffState> {
    if values.len() < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: values.len(),
        });
    }
    let differenced = values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(DiffState {
        differenced,
        base_level: *values.last().expect("len >= 2"),
    })
}

/// Cumulative sums from a starting level: out_c = start + d_1 + ... + d_c.
pub fn integrate(diffs: &[f64], start_level: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(diffs.len());
    let mut level = start_level;
    for &d in diffs {
        level += d;
        out.push(level);
    }
    out
}

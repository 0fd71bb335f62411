//! Classical comparison forecasters and the shared-fold method
//! comparison harness: Holt-Winters triple exponential smoothing
//! (additive or multiplicative seasonality) and the seasonal naive rule.

use std::time::Instant;

use crate::engine::Variant;
use crate::error::{Error, Result};
use crate::preprocess::select_lambda_guerrero;
use crate::series::{make_splits, mape, Series};
use crate::tuner::{grid_search, LambdaPolicy, TuneOptions, DEFAULT_PERIOD, LAMBDA_INTERVAL};

/// Seasonal composition of the Holt-Winters recursions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeasonalMode {
    Additive,
    Multiplicative,
}

impl std::fmt::Display for SeasonalMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeasonalMode::Additive => write!(f, "additive"),
            SeasonalMode::Multiplicative => write!(f, "multiplicative"),
        }
    }
}

/// A fitted Holt-Winters model.
#[derive(Debug, Clone, PartialEq)]
pub struct HoltWintersModel {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub seasonal_mode: SeasonalMode,
    pub period: usize,
    pub level: f64,
    pub trend: f64,
    /// Phase-aligned seasonal components: entry j applies to forecast
    /// step j+1 (and then cycles).
    pub seasonal_state: Vec<f64>,
    /// In-sample one-step squared-error total the parameters minimized.
    pub one_step_sse: f64,
}

struct HwState {
    level: f64,
    trend: f64,
    seas: Vec<f64>,
}

/// Decomposition-based initial state from the first two cycles. The
/// level is placed at time m and the per-position components are taken
/// against the fitted trend line, so a perfectly linear series
/// initializes with zero seasonality and an exact level/trend pair.
fn hw_init(x: &[f64], m: usize, mode: SeasonalMode) -> HwState {
    let mf = m as f64;
    let mean1 = x[..m].iter().sum::<f64>() / mf;
    let mean2 = x[m..2 * m].iter().sum::<f64>() / mf;
    let trend = (mean2 - mean1) / mf;
    let level = mean1 + trend * (mf - 1.0) / 2.0;
    let mut seas = Vec::with_capacity(m);
    for (i, &v) in x[..m].iter().enumerate() {
        let line = mean1 + ((i + 1) as f64 - (mf + 1.0) / 2.0) * trend;
        seas.push(match mode {
            SeasonalMode::Additive => v - line,
            SeasonalMode::Multiplicative => v / line,
        });
    }
    let mu = seas.iter().sum::<f64>() / mf;
    match mode {
        SeasonalMode::Additive => seas.iter_mut().for_each(|s| *s -= mu),
        SeasonalMode::Multiplicative => seas.iter_mut().for_each(|s| *s /= mu),
    }
    HwState { level, trend, seas }
}

/// One full filtering pass. Returns the one-step SSE and the end state.
fn hw_filter(
    x: &[f64],
    m: usize,
    mode: SeasonalMode,
    init: &HwState,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> (f64, HwState) {
    let mut level = init.level;
    let mut trend = init.trend;
    let mut seas = init.seas.clone();
    let mut sse = 0.0;
    for (i, &v) in x.iter().enumerate().skip(m) {
        let s_old = seas[i % m];
        let ahead = level + trend;
        let pred = match mode {
            SeasonalMode::Additive => ahead + s_old,
            SeasonalMode::Multiplicative => ahead * s_old,
        };
        let e = v - pred;
        sse += e * e;
        let deseason = match mode {
            SeasonalMode::Additive => v - s_old,
            SeasonalMode::Multiplicative => v / s_old,
        };
        let prev_level = level;
        level = alpha * deseason + (1.0 - alpha) * ahead;
        trend = beta * (level - prev_level) + (1.0 - beta) * trend;
        seas[i % m] = match mode {
            SeasonalMode::Additive => gamma * (v - level) + (1.0 - gamma) * s_old,
            SeasonalMode::Multiplicative => gamma * (v / level) + (1.0 - gamma) * s_old,
        };
    }
    (sse, HwState { level, trend, seas })
}

const NM_START: [f64; 3] = [0.2, 0.1, 0.1];
const NM_MAX_ITER: usize = 500;
const NM_TOL: f64 = 1e-6;

/// Nelder-Mead on the unit cube: reflection 1, expansion 2, contraction
/// 0.5, shrink 0.5, converging when the simplex collapses below `tol`
/// in every coordinate. Out-of-box or non-finite objective values count
/// as positive infinity.
fn nelder_mead(f: impl Fn([f64; 3]) -> f64, start: [f64; 3]) -> ([f64; 3], f64) {
    let eval = |p: [f64; 3]| -> f64 {
        if p.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return f64::INFINITY;
        }
        let v = f(p);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((start, eval(start)));
    for d in 0..3 {
        let mut p = start;
        p[d] += 0.1;
        simplex.push((p, eval(p)));
    }
    for _ in 0..NM_MAX_ITER {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = (0..3)
            .map(|d| {
                simplex
                    .iter()
                    .map(|(p, _)| (p[d] - simplex[0].0[d]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread < NM_TOL {
            break;
        }
        let worst = simplex[3];
        let mut c = [0.0; 3];
        for v in simplex.iter().take(3) {
            for (cd, vd) in c.iter_mut().zip(v.0.iter()) {
                *cd += vd / 3.0;
            }
        }
        let refl = std::array::from_fn(|d| c[d] + (c[d] - worst.0[d]));
        let f_refl = eval(refl);
        if f_refl < simplex[0].1 {
            let exp = std::array::from_fn(|d| c[d] + 2.0 * (c[d] - worst.0[d]));
            let f_exp = eval(exp);
            simplex[3] = if f_exp < f_refl { (exp, f_exp) } else { (refl, f_refl) };
        } else if f_refl < simplex[2].1 {
            simplex[3] = (refl, f_refl);
        } else {
            let (cand, f_cand) = if f_refl < worst.1 {
                let p: [f64; 3] = std::array::from_fn(|d| c[d] + 0.5 * (refl[d] - c[d]));
                (p, eval(p))
            } else {
                let p: [f64; 3] = std::array::from_fn(|d| c[d] - 0.5 * (c[d] - worst.0[d]));
                (p, eval(p))
            };
            if f_cand < worst.1.min(f_refl) {
                simplex[3] = (cand, f_cand);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    let shrunk: [f64; 3] = std::array::from_fn(|d| best[d] + 0.5 * (v.0[d] - best[d]));
                    *v = (shrunk, eval(shrunk));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, simplex[0].1)
}

/// Fits a Holt-Winters model, choosing (alpha, beta, gamma) by
/// minimizing the in-sample one-step squared error.
pub fn hw_fit(series: &Series, period: usize, mode: SeasonalMode) -> Result<HoltWintersModel> {
    if period == 0 {
        return Err(Error::InvalidArgument("period must be >= 1".into()));
    }
    let x = series.values();
    let t = x.len();
    let required = 2 * period + 1;
    if t < required {
        return Err(Error::TooShort {
            required,
            actual: t,
        });
    }
    if mode == SeasonalMode::Multiplicative {
        for (i, &v) in x.iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositiveValue { position: i + 1 });
            }
        }
    }
    let init = hw_init(x, period, mode);
    let objective = |p: [f64; 3]| hw_filter(x, period, mode, &init, p[0], p[1], p[2]).0;
    let (params, best) = nelder_mead(objective, NM_START);
    if !best.is_finite() {
        return Err(Error::OptimizationFailure);
    }
    let (sse, state) = hw_filter(x, period, mode, &init, params[0], params[1], params[2]);
    if !(state.level.is_finite()
        && state.trend.is_finite()
        && state.seas.iter().all(|s| s.is_finite()))
    {
        return Err(Error::OptimizationFailure);
    }
    // Align the seasonal slots with forecast steps: slot (t-1) % m holds
    // the component for time t, so step h reads slot (T + h - 1) % m.
    let seasonal_state = (0..period).map(|j| state.seas[(t + j) % period]).collect();
    Ok(HoltWintersModel {
        alpha: params[0],
        beta: params[1],
        gamma: params[2],
        seasonal_mode: mode,
        period,
        level: state.level,
        trend: state.trend,
        seasonal_state,
        one_step_sse: sse,
    })
}

/// n-step-ahead forecasts from a fitted model.
pub fn hw_forecast(model: &HoltWintersModel, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|h| {
            let base = model.level + h as f64 * model.trend;
            let s = model.seasonal_state[(h - 1) % model.period];
            match model.seasonal_mode {
                SeasonalMode::Additive => base + s,
                SeasonalMode::Multiplicative => base * s,
            }
        })
        .collect()
}

/// Repeats the last observed cycle: forecast_h = x_{T-period+((h-1) mod period)+1}.
pub fn seasonal_naive(series: &Series, period: usize, n: usize) -> Result<Vec<f64>> {
    if period == 0 || n == 0 {
        return Err(Error::InvalidArgument("period and n must be >= 1".into()));
    }
    let x = series.values();
    if x.len() < period {
        return Err(Error::TooShort {
            required: period,
            actual: x.len(),
        });
    }
    let start = x.len() - period;
    Ok((0..n).map(|h| x[start + h % period]).collect())
}

/// A forecasting method the comparison harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    CptoWnn,
    FptoWnn,
    HoltWinters(HwChoice),
    SeasonalNaive,
}

/// Seasonal mode for the Holt-Winters column: fixed, or picked from the
/// data (multiplicative when all values are positive and the estimated
/// Box-Cox lambda is below 0.5, else additive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HwChoice {
    Additive,
    Multiplicative,
    Auto,
}

/// Score of one method in a comparison row.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodOutcome {
    /// Mean MAPE over the shared folds, percent.
    Mape(f64),
    /// The method could not produce forecasts on these folds.
    Failure(String),
}

/// One column of a comparison row.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodCell {
    /// Honest column label, e.g. "holt_winters_additive".
    pub label: String,
    pub outcome: MethodOutcome,
    pub wall_clock_seconds: f64,
    /// (p*, k*) for the tuned nearest-neighbor methods.
    pub tuned: Option<(usize, usize)>,
}

/// All methods scored on the identical fold family at one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub horizon_n: usize,
    pub i_sets: usize,
    pub cells: Vec<MethodCell>,
}

/// Knobs shared by all methods in one comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub k_max: usize,
    pub w_max: usize,
    pub lambda_policy: LambdaPolicy,
    pub threads: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            k_max: 10,
            w_max: 15,
            lambda_policy: LambdaPolicy::PerFold,
            threads: 1,
        }
    }
}

fn resolve_hw_mode(series: &Series, choice: HwChoice) -> SeasonalMode {
    match choice {
        HwChoice::Additive => SeasonalMode::Additive,
        HwChoice::Multiplicative => SeasonalMode::Multiplicative,
        HwChoice::Auto => {
            let positive = series.values().iter().all(|&v| v > 0.0);
            if !positive {
                return SeasonalMode::Additive;
            }
            let period = series.period().unwrap_or(DEFAULT_PERIOD);
            match select_lambda_guerrero(series, period, LAMBDA_INTERVAL) {
                Ok(p) if p.lambda < 0.5 => SeasonalMode::Multiplicative,
                _ => SeasonalMode::Additive,
            }
        }
    }
}

fn fold_mean_mape(
    series: &Series,
    n: usize,
    i_sets: usize,
    mut forecast_fold: impl FnMut(&Series) -> Result<Vec<f64>>,
) -> Result<f64> {
    let plan = make_splits(series, n, i_sets)?;
    let x = series.values();
    let mut sum = 0.0;
    for split in &plan.splits {
        let train = series.prefix(split.train_len)?;
        let preds = forecast_fold(&train)?;
        sum += mape(&x[split.test_range.clone()], &preds)?.mape_percent;
    }
    Ok(sum / i_sets as f64)
}

/// Scores every requested method on the same rolling-origin folds at one
/// horizon. Per-method failures become failure cells; the row survives.
pub fn compare_methods(
    series: &Series,
    n: usize,
    i_sets: usize,
    methods: &[Method],
    options: &CompareOptions,
) -> Result<ComparisonRow> {
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no methods requested".into()));
    }
    // Fail early if the fold family itself is impossible.
    make_splits(series, n, i_sets)?;
    let period = series.period().unwrap_or(DEFAULT_PERIOD);

    let mut cells = Vec::with_capacity(methods.len());
    for method in methods {
        let started = Instant::now();
        let (label, outcome, tuned) = match method {
            Method::CptoWnn | Method::FptoWnn => {
                let variant = if *method == Method::CptoWnn {
                    Variant::Cpto
                } else {
                    Variant::Fpto
                };
                let opts = TuneOptions {
                    variant,
                    n,
                    k_max: options.k_max,
                    w_max: options.w_max,
                    i_sets,
                    lambda_policy: options.lambda_policy,
                    threads: options.threads,
                };
                let label = format!("{variant}_wnn");
                match grid_search(series, &opts) {
                    Ok(r) => (
                        label,
                        MethodOutcome::Mape(r.mape_star),
                        Some((r.p_star, r.k_star)),
                    ),
                    Err(e) => (label, MethodOutcome::Failure(e.to_string()), None),
                }
            }
            Method::HoltWinters(choice) => {
                let mode = resolve_hw_mode(series, *choice);
                let label = format!("holt_winters_{mode}");
                let res = fold_mean_mape(series, n, i_sets, |train| {
                    let model = hw_fit(train, period, mode)?;
                    Ok(hw_forecast(&model, n))
                });
                match res {
                    Ok(m) => (label, MethodOutcome::Mape(m), None),
                    Err(e) => (label, MethodOutcome::Failure(e.to_string()), None),
                }
            }
            Method::SeasonalNaive => {
                let res = fold_mean_mape(series, n, i_sets, |train| {
                    seasonal_naive(train, period, n)
                });
                match res {
                    Ok(m) => ("seasonal_naive".to_string(), MethodOutcome::Mape(m), None),
                    Err(e) => (
                        "seasonal_naive".to_string(),
                        MethodOutcome::Failure(e.to_string()),
                        None,
                    ),
                }
            }
        };
        cells.push(MethodCell {
            label,
            outcome,
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            tuned,
        });
    }
    Ok(ComparisonRow {
        horizon_n: n,
        i_sets,
        cells,
    })
}

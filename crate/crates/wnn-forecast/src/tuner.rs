//! Rolling-origin cross-validation and exhaustive (p, k) grid search.
//!
//! Every candidate cell is scored by the mean holdout MAPE over I
//! training prefixes (fold i trains on x_1..x_{T-i*n} and tests on the
//! next n points). The search is exhaustive over {1..w_max} x {1..k_max},
//! restricted to cells passing the variant's feasibility constraint.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::engine::{
    self, neighbor_set_from_ranked, ranked_candidates_cpto, ranked_candidates_fpto, roc_weights,
    NeighborEntry, Variant, WnnConfig,
};
use crate::error::{Error, Result};
use crate::preprocess::{
    boxcox_vec, difference, integrate, inv_boxcox_vec, select_lambda_guerrero, BoxCoxParams,
};
use crate::series::{make_splits, mape, Series};

/// Default Box-Cox search interval.
pub const LAMBDA_INTERVAL: (f64, f64) = (-1.0, 2.0);

/// Seasonal period assumed when the series does not carry one.
pub const DEFAULT_PERIOD: usize = 12;

/// How the Box-Cox lambda is obtained during tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaPolicy {
    /// Re-estimate on each fold's training part (no test-set leakage).
    PerFold,
    /// Estimate once on the full series and reuse everywhere.
    Global,
    /// Use the given value without estimation.
    Fixed(f64),
}

/// Why a grid cell produced no MAPE.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// The cell fails the variant's (p, k) feasibility inequality.
    ConstraintViolated,
    /// The inequality held but some fold could not be evaluated (for
    /// example, the differenced prefix was too short for p + k, or the
    /// inverse transform left its domain).
    EvaluationFailed(String),
}

/// Result of one (p, k) cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    /// Mean MAPE over the I folds, in percent.
    Mape(f64),
    Infeasible(InfeasibleReason),
}

/// The full evaluated grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneGrid {
    pub variant: Variant,
    pub n: usize,
    pub k_max: usize,
    pub w_max: usize,
    pub i_sets: usize,
    /// Outcome per (p, k), covering the whole {1..w_max} x {1..k_max} grid.
    pub cells: BTreeMap<(usize, usize), CellOutcome>,
}

/// Winner of the grid search plus everything it was chosen from.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub p_star: usize,
    pub k_star: usize,
    pub mape_star: f64,
    pub grid: TuneGrid,
    pub wall_clock_seconds: f64,
}

/// Options for [`grid_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct TuneOptions {
    pub variant: Variant,
    pub n: usize,
    pub k_max: usize,
    pub w_max: usize,
    pub i_sets: usize,
    pub lambda_policy: LambdaPolicy,
    /// 1 = strictly sequential; 0 = one thread per core; otherwise the
    /// exact pool size. Results are identical regardless.
    pub threads: usize,
}

/// Feasibility inequality for a (p, k) cell.
///
/// Stride-1: p + k <= T - n*I - n + 1. Stride-n: n*(p + k) <= T - n*I
/// (the integer form of p + k <= (T - n*I)/n). These bound the candidate
/// pool before differencing; a cell on the boundary can still run out of
/// candidates by one inside a fold, which is reported per cell rather
/// than globally.
pub fn constraint_ok(variant: Variant, p: usize, k: usize, t: usize, n: usize, i_sets: usize) -> bool {
    if p == 0 || k == 0 || t == 0 || n == 0 || i_sets == 0 {
        return false;
    }
    let (p, k, t, n, i) = (p as i64, k as i64, t as i64, n as i64, i_sets as i64);
    match variant {
        Variant::Cpto => p + k <= t - n * i - n + 1,
        Variant::Fpto => n * (p + k) <= t - n * i,
    }
}

/// Number of training sets implied by holding out a fraction of the
/// series: ceil(fraction * T / n), computed with a small slack so exact
/// integer products do not round up spuriously.
pub fn sets_from_fraction(t: usize, n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction must lie in (0, 1), got {fraction}"
        )));
    }
    if n == 0 || t == 0 {
        return Err(Error::InvalidArgument("T and n must be >= 1".into()));
    }
    let raw = fraction * t as f64 / n as f64;
    let i = (raw - 1e-9).ceil() as usize;
    if i == 0 {
        return Err(Error::InsufficientData {
            reason: format!("fraction {fraction} of T = {t} yields no test block at n = {n}"),
        });
    }
    Ok(i)
}

/// Everything about one fold that does not depend on (p, k).
struct FoldCtx {
    /// Differenced transformed training prefix.
    h: Vec<f64>,
    /// Last transformed level, where integration restarts.
    base_level: f64,
    /// Actual values of the n-point test block.
    test: Vec<f64>,
    lambda: f64,
}

fn lambda_for_fold(
    series: &Series,
    train_len: usize,
    policy: LambdaPolicy,
    global: Option<f64>,
) -> Result<f64> {
    match policy {
        LambdaPolicy::Fixed(v) => Ok(v),
        LambdaPolicy::Global => Ok(global.expect("global lambda precomputed")),
        LambdaPolicy::PerFold => {
            let period = series.period().unwrap_or(DEFAULT_PERIOD);
            let train = series.prefix(train_len)?;
            Ok(select_lambda_guerrero(&train, period, LAMBDA_INTERVAL)?.lambda)
        }
    }
}

fn build_folds(series: &Series, n: usize, i_sets: usize, policy: LambdaPolicy) -> Result<Vec<FoldCtx>> {
    let plan = make_splits(series, n, i_sets)?;
    let global = match policy {
        LambdaPolicy::Global => {
            let period = series.period().unwrap_or(DEFAULT_PERIOD);
            Some(select_lambda_guerrero(series, period, LAMBDA_INTERVAL)?.lambda)
        }
        _ => None,
    };
    let x = series.values();
    plan.splits
        .iter()
        .map(|split| {
            let lambda = lambda_for_fold(series, split.train_len, policy, global)?;
            let g = boxcox_vec(&x[..split.train_len], lambda)?;
            let diff = difference(&g)?;
            Ok(FoldCtx {
                h: diff.differenced,
                base_level: diff.base_level,
                test: x[split.test_range.clone()].to_vec(),
                lambda,
            })
        })
        .collect()
}

/// Scores one fold for one (p, k) given the fold's pre-ranked candidates.
/// The arithmetic here mirrors `engine::forecast` exactly so that cached
/// and uncached evaluation agree bit for bit.
fn fold_mape_from_ranked(
    fold: &FoldCtx,
    ranked: &[NeighborEntry],
    weights: &engine::RocWeights,
    variant: Variant,
    p: usize,
    k: usize,
    n: usize,
) -> Result<f64> {
    let ns = neighbor_set_from_ranked(ranked, k)?;
    let offset = variant.target_offset(p, n);
    let diff_forecasts = engine::wnn_step_forecast(&fold.h, &ns, weights, n, offset)?;
    let levels = integrate(&diff_forecasts, fold.base_level);
    let forecasts = inv_boxcox_vec(&levels, fold.lambda)?;
    Ok(mape(&fold.test, &forecasts)?.mape_percent)
}

/// Per-fold, per-cell evaluation outcome. Errors are carried as text so
/// fold matrices can cross threads.
#[derive(Clone)]
enum FoldCell {
    Skipped,
    Value(f64),
    Failed(String),
}

fn evaluate_fold(
    fold: &FoldCtx,
    variant: Variant,
    n: usize,
    w_max: usize,
    k_max: usize,
    mask: &[Vec<bool>],
    weights: &[engine::RocWeights],
) -> Vec<Vec<FoldCell>> {
    let mut out = vec![vec![FoldCell::Skipped; k_max]; w_max];
    for p in 1..=w_max {
        if !mask[p - 1].iter().any(|&m| m) {
            continue;
        }
        let ranked = match variant {
            Variant::Cpto => ranked_candidates_cpto(&fold.h, p, n),
            Variant::Fpto => ranked_candidates_fpto(&fold.h, p, n),
        };
        match ranked {
            Err(e) => {
                let msg = e.to_string();
                for k in 1..=k_max {
                    if mask[p - 1][k - 1] {
                        out[p - 1][k - 1] = FoldCell::Failed(msg.clone());
                    }
                }
            }
            Ok(ranked) => {
                for k in 1..=k_max {
                    if !mask[p - 1][k - 1] {
                        continue;
                    }
                    out[p - 1][k - 1] =
                        match fold_mape_from_ranked(fold, &ranked, &weights[k - 1], variant, p, k, n)
                        {
                            Ok(m) => FoldCell::Value(m),
                            Err(e) => FoldCell::Failed(e.to_string()),
                        };
                }
            }
        }
    }
    out
}

/// Mean holdout MAPE of a single (p, k) cell over I folds, evaluated the
/// slow way: one full `engine::forecast` per fold.
pub fn evaluate_cell(
    series: &Series,
    variant: Variant,
    p: usize,
    k: usize,
    n: usize,
    i_sets: usize,
    lambda_policy: LambdaPolicy,
) -> Result<f64> {
    if !constraint_ok(variant, p, k, series.len(), n, i_sets) {
        return Err(Error::Infeasible(format!(
            "cell (p = {p}, k = {k}) violates the {variant} feasibility inequality"
        )));
    }
    let plan = make_splits(series, n, i_sets)?;
    let global = match lambda_policy {
        LambdaPolicy::Global => {
            let period = series.period().unwrap_or(DEFAULT_PERIOD);
            Some(select_lambda_guerrero(series, period, LAMBDA_INTERVAL)?.lambda)
        }
        _ => None,
    };
    let cfg = WnnConfig { variant, n, p, k };
    let mut sum = 0.0;
    for split in &plan.splits {
        let lambda = lambda_for_fold(series, split.train_len, lambda_policy, global)?;
        let prefix = series.prefix(split.train_len + n)?;
        let r = engine::forecast(&prefix, &cfg, &BoxCoxParams::fixed(lambda), true)?;
        sum += r
            .holdout_accuracy
            .expect("holdout mode always reports accuracy")
            .mape_percent;
    }
    Ok(sum / i_sets as f64)
}

/// Exhaustive search over the (p, k) grid.
///
/// Cells are merged in deterministic (k ascending, p ascending) order
/// with a strict-less winner update, so ties resolve to the smallest k
/// and then the smallest p. Fold evaluation may run on a thread pool;
/// fold results are collected in fold order, making the output identical
/// to a sequential run.
pub fn grid_search(series: &Series, opts: &TuneOptions) -> Result<TuneResult> {
    let started = Instant::now();
    let (n, k_max, w_max, i_sets) = (opts.n, opts.k_max, opts.w_max, opts.i_sets);
    if n == 0 || k_max == 0 || w_max == 0 || i_sets == 0 {
        return Err(Error::InvalidArgument(
            "n, k_max, w_max and I must all be >= 1".into(),
        ));
    }
    let t = series.len();

    let mask: Vec<Vec<bool>> = (1..=w_max)
        .map(|p| {
            (1..=k_max)
                .map(|k| constraint_ok(opts.variant, p, k, t, n, i_sets))
                .collect()
        })
        .collect();
    if !mask.iter().flatten().any(|&m| m) {
        return Err(Error::NoFeasibleCell);
    }

    let folds = build_folds(series, n, i_sets, opts.lambda_policy)?;
    let weights: Vec<engine::RocWeights> = (1..=k_max)
        .map(|k| roc_weights(k).expect("k >= 1"))
        .collect();

    let eval = |fold: &FoldCtx| evaluate_fold(fold, opts.variant, n, w_max, k_max, &mask, &weights);
    let fold_results: Vec<Vec<Vec<FoldCell>>> = if opts.threads == 1 {
        folds.iter().map(eval).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| folds.par_iter().map(eval).collect())
    };

    let mut cells = BTreeMap::new();
    for p in 1..=w_max {
        for k in 1..=k_max {
            if !mask[p - 1][k - 1] {
                cells.insert(
                    (p, k),
                    CellOutcome::Infeasible(InfeasibleReason::ConstraintViolated),
                );
                continue;
            }
            let mut sum = 0.0;
            let mut failure = None;
            for fr in &fold_results {
                match &fr[p - 1][k - 1] {
                    FoldCell::Value(m) => sum += m,
                    FoldCell::Failed(msg) => {
                        failure = Some(msg.clone());
                        break;
                    }
                    FoldCell::Skipped => unreachable!("masked cell was not evaluated"),
                }
            }
            let outcome = match failure {
                Some(msg) => CellOutcome::Infeasible(InfeasibleReason::EvaluationFailed(msg)),
                None => CellOutcome::Mape(sum / i_sets as f64),
            };
            cells.insert((p, k), outcome);
        }
    }

    let mut best: Option<(usize, usize, f64)> = None;
    for k in 1..=k_max {
        for p in 1..=w_max {
            if let Some(CellOutcome::Mape(m)) = cells.get(&(p, k)) {
                if best.is_none_or(|(_, _, bm)| *m < bm) {
                    best = Some((p, k, *m));
                }
            }
        }
    }
    let (p_star, k_star, mape_star) = best.ok_or(Error::NoFeasibleCell)?;

    Ok(TuneResult {
        p_star,
        k_star,
        mape_star,
        grid: TuneGrid {
            variant: opts.variant,
            n,
            k_max,
            w_max,
            i_sets,
            cells,
        },
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

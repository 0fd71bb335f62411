//! Weighted-nearest-neighbor forecasting for seasonal univariate series.
//!
//! The pipeline transforms a positive series with Box-Cox (lambda picked
//! by minimizing block-wise variation), takes lag-1 differences, and
//! forecasts the next n points as a rank-weighted average of what
//! followed the historical windows most similar to the present one. Two
//! candidate layouts exist: `Cpto` slides the comparison window one
//! point at a time, `Fpto` one n-point block at a time, trading a finer
//! candidate grid for less work per tuning run.
//!
//! Window length p and neighbor count k are chosen by exhaustive grid
//! search under rolling-origin cross-validation: fold i trains on
//! x_1..x_{T-i*n} and is scored by MAPE on the n points that follow, and
//! the (p, k) cell with the lowest mean MAPE wins. Classical baselines
//! (Holt-Winters, seasonal naive) can be scored on the identical folds
//! for comparison.
//!
//! ```
//! use wnn_forecast::{
//!     grid_search, LambdaPolicy, Series, TuneOptions, Variant,
//! };
//!
//! // Monthly-looking seasonal series with a trend.
//! let values: Vec<f64> = (1..=72)
//!     .map(|t| {
//!         let t = t as f64;
//!         100.0 + 2.0 * t + 10.0 * (std::f64::consts::TAU * t / 12.0).sin()
//!     })
//!     .collect();
//! let series = Series::new(values).unwrap().with_period(12).unwrap();
//!
//! let result = grid_search(
//!     &series,
//!     &TuneOptions {
//!         variant: Variant::Cpto,
//!         n: 3,
//!         k_max: 4,
//!         w_max: 6,
//!         i_sets: 3,
//!         lambda_policy: LambdaPolicy::PerFold,
//!         threads: 1,
//!     },
//! )
//! .unwrap();
//! assert!(result.p_star >= 1 && result.k_star >= 1);
//! ```

pub mod baselines;
pub mod engine;
pub mod error;
pub mod preprocess;
pub mod series;
pub mod tuner;

pub use baselines::{
    compare_methods, hw_fit, hw_forecast, seasonal_naive, CompareOptions, ComparisonRow, HwChoice,
    HoltWintersModel, Method, MethodCell, MethodOutcome, SeasonalMode,
};
pub use engine::{
    cpto_neighbor_set, euclidean, forecast, fpto_neighbor_set, roc_weights, wnn_step_forecast,
    ForecastResult, NeighborEntry, NeighborSet, RocWeights, Variant, WnnConfig,
};
pub use error::{Error, Result};
pub use preprocess::{
    boxcox, boxcox_vec, detect_adjust_outliers, difference, integrate, inv_boxcox,
    inv_boxcox_vec, select_lambda_guerrero, BoxCoxParams, DiffState, OutlierReport,
};
pub use series::{
    load_csv, load_csv_full, make_splits, mape, AccuracyReport, ColumnSpec, Series, Split,
    SplitPlan,
};
pub use tuner::{
    constraint_ok, evaluate_cell, grid_search, sets_from_fraction, CellOutcome, InfeasibleReason,
    LambdaPolicy, TuneGrid, TuneOptions, TuneResult, DEFAULT_PERIOD, LAMBDA_INTERVAL,
};

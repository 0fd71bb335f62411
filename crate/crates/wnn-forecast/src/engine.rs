//! The weighted-nearest-neighbor forecasting engine: candidate windows,
//! Euclidean ranking, rank-order-centroid weighting, and the multi-step
//! forecast recursion in differenced Box-Cox space.
//!
//! Two candidate layouts are supported. `Cpto` slides the window one
//! point at a time over the differenced series; `Fpto` slides it one
//! whole n-point block at a time, so candidates are aligned to forecast
//! horizons and there are roughly n times fewer of them.

use crate::error::{Error, Result};
use crate::preprocess::{boxcox_vec, difference, integrate, inv_boxcox_vec, BoxCoxParams};
use crate::series::{mape, AccuracyReport, Series};

/// Candidate layout over the differenced series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Stride-1 candidates; window length is p points.
    Cpto,
    /// Stride-n candidates; window length is p blocks of n points.
    Fpto,
}

impl Variant {
    /// Distance from a candidate's start to its target block, in points.
    pub fn target_offset(self, p: usize, n: usize) -> usize {
        match self {
            Variant::Cpto => p,
            Variant::Fpto => n * p,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Cpto => write!(f, "cpto"),
            Variant::Fpto => write!(f, "fpto"),
        }
    }
}

/// A fully specified forecasting configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WnnConfig {
    pub variant: Variant,
    /// Forecast horizon in points.
    pub n: usize,
    /// Window length: points for `Cpto`, blocks of n points for `Fpto`.
    pub p: usize,
    /// Neighbor count.
    pub k: usize,
}

impl WnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 || self.k == 0 {
            return Err(Error::InvalidArgument(
                "n, p and k must all be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One ranked neighbor: 1-based start position of its window in the
/// differenced series, and its distance from the query window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborEntry {
    pub candidate_index: usize,
    pub distance: f64,
}

/// The k nearest candidate windows, ranked by ascending distance with
/// exact ties broken toward the more recent (larger) index.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSet {
    pub entries: Vec<NeighborEntry>,
    /// Partition of rank indices 0..k into runs of equal distance
    /// (absolute tolerance 1e-12 against the run's first entry).
    pub tie_groups: Vec<std::ops::Range<usize>>,
}

/// Absolute tolerance under which two distances count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Rank-order-centroid weights w_j = (1/k) * sum_{i=j..k} 1/i.
///
/// Strictly decreasing, and they sum to 1 by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RocWeights {
    pub weights: Vec<f64>,
}

pub fn roc_weights(k: usize) -> Result<RocWeights> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let mut weights = vec![0.0; k];
    let mut suffix = 0.0;
    for j in (1..=k).rev() {
        suffix += 1.0 / j as f64;
        weights[j - 1] = suffix / k as f64;
    }
    Ok(RocWeights { weights })
}

/// Euclidean distance with deterministic left-to-right summation.
pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument(
            "distance of empty sequences".into(),
        ));
    }
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        sum += d * d;
    }
    Ok(sum.sqrt())
}

/// Every candidate for the stride-1 layout, ranked by (distance asc,
/// index desc). Candidate j (1-based) covers h_j..h_{j+p-1}; its target
/// block h_{j+p}..h_{j+p+n-1} must fit inside h, so j runs 1..=L-p-n+1.
pub(crate) fn ranked_candidates_cpto(h: &[f64], p: usize, n: usize) -> Result<Vec<NeighborEntry>> {
    let l = h.len();
    if l < p + n {
        return Err(Error::Infeasible(format!(
            "stride-1 candidates need L >= p + n, got L = {l}, p = {p}, n = {n}"
        )));
    }
    let query = &h[l - p..];
    let mut ranked = Vec::with_capacity(l - p - n + 1);
    for j in 1..=l - p - n + 1 {
        let window = &h[j - 1..j - 1 + p];
        ranked.push(NeighborEntry {
            candidate_index: j,
            distance: euclidean(query, window)?,
        });
    }
    sort_ranked(&mut ranked);
    Ok(ranked)
}

/// Every candidate for the stride-n layout, ranked by (distance asc,
/// index desc). The query is the last n*p values; candidate starts step
/// backwards from L-(p+1)n+1 in jumps of n while they stay >= 1.
pub(crate) fn ranked_candidates_fpto(
    h: &[f64],
    p: usize,
    n: usize,
) -> Result<Vec<NeighborEntry>> {
    let l = h.len();
    let window_len = n * p;
    if l < n * (p + 1) {
        return Err(Error::Infeasible(format!(
            "stride-n candidates need L >= n*(p+1), got L = {l}, p = {p}, n = {n}"
        )));
    }
    let query = &h[l - window_len..];
    let start = l - (p + 1) * n + 1;
    let count = (start - 1) / n + 1;
    let mut ranked = Vec::with_capacity(count);
    let mut j = start;
    loop {
        let window = &h[j - 1..j - 1 + window_len];
        ranked.push(NeighborEntry {
            candidate_index: j,
            distance: euclidean(query, window)?,
        });
        if j <= n {
            break;
        }
        j -= n;
    }
    sort_ranked(&mut ranked);
    Ok(ranked)
}

fn sort_ranked(ranked: &mut [NeighborEntry]) {
    // Total order: distances are finite, and equal distances resolve by
    // index, so unstable sort is deterministic here.
    ranked.sort_unstable_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then_with(|| b.candidate_index.cmp(&a.candidate_index))
    });
}

/// Takes the top k of a ranked candidate list and marks its tie runs.
pub(crate) fn neighbor_set_from_ranked(ranked: &[NeighborEntry], k: usize) -> Result<NeighborSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if k > ranked.len() {
        return Err(Error::Infeasible(format!(
            "k = {k} exceeds the {} available candidates",
            ranked.len()
        )));
    }
    let entries = ranked[..k].to_vec();
    let mut tie_groups = Vec::new();
    let mut group_start = 0;
    let mut leader = entries[0].distance;
    for (r, e) in entries.iter().enumerate().skip(1) {
        if e.distance - leader > TIE_TOLERANCE {
            tie_groups.push(group_start..r);
            group_start = r;
            leader = e.distance;
        }
    }
    tie_groups.push(group_start..k);
    Ok(NeighborSet {
        entries,
        tie_groups,
    })
}

/// k nearest stride-1 candidates. See [`ranked_candidates_cpto`] for the
/// candidate grid.
pub fn cpto_neighbor_set(h: &[f64], p: usize, k: usize, n: usize) -> Result<NeighborSet> {
    let ranked = ranked_candidates_cpto(h, p, n)?;
    neighbor_set_from_ranked(&ranked, k)
}

/// k nearest stride-n candidates. See [`ranked_candidates_fpto`] for the
/// candidate grid.
pub fn fpto_neighbor_set(h: &[f64], p: usize, k: usize, n: usize) -> Result<NeighborSet> {
    let ranked = ranked_candidates_fpto(h, p, n)?;
    neighbor_set_from_ranked(&ranked, k)
}

/// Weighted n-step forecast in differenced space.
///
/// Step c is the rank-weighted sum over neighbors of their target value
/// h_{j + target_offset + (c-1)} (1-based), where neighbors tied in
/// distance share their ranks' weight through the tie-group mean: ranks
/// in one group all contribute w_rank times the group's average target.
pub fn wnn_step_forecast(
    h: &[f64],
    ns: &NeighborSet,
    weights: &RocWeights,
    n: usize,
    target_offset: usize,
) -> Result<Vec<f64>> {
    let k = ns.entries.len();
    if weights.weights.len() != k {
        return Err(Error::LengthMismatch {
            left: weights.weights.len(),
            right: k,
        });
    }
    for e in &ns.entries {
        // 1-based: j + target_offset + (n-1) must stay <= len(h).
        if e.candidate_index + target_offset + n - 1 > h.len() {
            return Err(Error::IndexOutOfRange);
        }
    }
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        // Per-group mean of the step-c targets, then each rank adds its
        // own weight times its group's mean.
        let mut group_mean = vec![0.0; ns.tie_groups.len()];
        for (gi, group) in ns.tie_groups.iter().enumerate() {
            let mut sum = 0.0;
            for r in group.clone() {
                let j = ns.entries[r].candidate_index;
                sum += h[j - 1 + target_offset + c];
            }
            group_mean[gi] = sum / group.len() as f64;
        }
        let mut s = 0.0;
        for (gi, group) in ns.tie_groups.iter().enumerate() {
            for r in group.clone() {
                s += weights.weights[r] * group_mean[gi];
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Full output of one forecast run.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    /// n forecasts in the original units of the series.
    pub forecasts: Vec<f64>,
    /// The same forecasts in differenced Box-Cox space (the s_c values).
    pub diff_forecasts: Vec<f64>,
    pub neighbor_set: NeighborSet,
    pub lambda_used: f64,
    /// Transformed level the integration started from.
    pub base_level: f64,
    /// Accuracy against the held-out tail; present only in holdout mode.
    pub holdout_accuracy: Option<AccuracyReport>,
}

/// Runs the full pipeline: Box-Cox transform, lag-1 difference, neighbor
/// search, weighted recursion, re-integration, inverse transform.
///
/// With `holdout` true the last n observations are withheld: the model
/// runs on x_1..x_{T-n} and the result carries MAPE against the tail.
/// With `holdout` false all T observations feed the model and the output
/// is n genuine future forecasts.
pub fn forecast(
    series: &Series,
    config: &WnnConfig,
    lambda: &BoxCoxParams,
    holdout: bool,
) -> Result<ForecastResult> {
    config.validate()?;
    let x = series.values();
    let t = x.len();
    let n = config.n;
    let cut = if holdout {
        if t <= n {
            return Err(Error::Infeasible(format!(
                "holdout needs T > n, got T = {t}, n = {n}"
            )));
        }
        t - n
    } else {
        t
    };

    let g = boxcox_vec(&x[..cut], lambda.lambda)?;
    let diff = difference(&g)?;
    let h = &diff.differenced;

    let ranked = match config.variant {
        Variant::Cpto => ranked_candidates_cpto(h, config.p, n)?,
        Variant::Fpto => ranked_candidates_fpto(h, config.p, n)?,
    };
    let ns = neighbor_set_from_ranked(&ranked, config.k)?;
    let weights = roc_weights(config.k)?;
    let offset = config.variant.target_offset(config.p, n);
    let diff_forecasts = wnn_step_forecast(h, &ns, &weights, n, offset)?;

    let levels = integrate(&diff_forecasts, diff.base_level);
    let forecasts = inv_boxcox_vec(&levels, lambda.lambda)?;

    let holdout_accuracy = if holdout {
        Some(mape(&x[cut..], &forecasts)?)
    } else {
        None
    };

    Ok(ForecastResult {
        forecasts,
        diff_forecasts,
        neighbor_set: ns,
        lambda_used: lambda.lambda,
        base_level: diff.base_level,
        holdout_accuracy,
    })
}

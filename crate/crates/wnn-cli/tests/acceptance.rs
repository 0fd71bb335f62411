//! Release gate: one test per acceptance criterion, each printing a
//! single [PASS]/[FAIL]/[SKIP] verdict line. Run with
//!
//!     cargo test -p wnn-cli --test acceptance -- --nocapture
//!
//! Data-dependent checks look for the real benchmark datasets via the
//! WNN_RETAIL_CSV / WNN_MILK_CSV environment variables, falling back to
//! data/retail_usa.csv and data/milk_uk.csv in the repository root, and
//! report SKIP when neither is present. Timing-sensitive checks hold a
//! shared lock so sibling tests cannot distort their wall-clock numbers.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wnn_forecast::{
    boxcox, cpto_neighbor_set, detect_adjust_outliers, difference, engine, fpto_neighbor_set,
    grid_search, hw_fit, hw_forecast, integrate, inv_boxcox, load_csv, roc_weights,
    seasonal_naive, sets_from_fraction, BoxCoxParams, ColumnSpec, LambdaPolicy, SeasonalMode,
    Series, TuneOptions, Variant, WnnConfig,
};

static TIMING: Mutex<()> = Mutex::new(());

fn timing_guard() -> MutexGuard<'static, ()> {
    TIMING.lock().unwrap_or_else(|e| e.into_inner())
}

fn pass(id: &str, detail: &str) {
    println!("[PASS] {id}: {detail}");
}

fn skip(id: &str, detail: &str) {
    println!("[SKIP] {id}: {detail}");
}

fn fail(id: &str, detail: &str) -> ! {
    println!("[FAIL] {id}: {detail}");
    panic!("{id}: {detail}");
}

/// Monthly-flavored positive series: trend, seasonality, deterministic
/// wiggle. Mirrors the scale of the retail benchmark at t = 338.
fn synthetic_monthly(t: usize) -> Series {
    let values = (0..t)
        .map(|i| {
            let i = i as f64;
            let season = 1.0 + 0.18 * (2.0 * std::f64::consts::PI * i / 12.0).sin();
            let wiggle = 1.0 + 0.03 * (0.7 * i).sin() * (0.13 * i).cos();
            (150.0 + 1.1 * i) * season * wiggle
        })
        .collect();
    Series::new(values).unwrap()
}

fn dataset(env_key: &str, default_rel: &str) -> Option<PathBuf> {
    if let Ok(p) = std::env::var(env_key) {
        return Some(PathBuf::from(p));
    }
    let fallback = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(default_rel);
    fallback.exists().then_some(fallback)
}

/// Loads a benchmark CSV: the `value` column when one exists, else the
/// last column (the common `date,value` layout).
fn load_dataset(path: &Path) -> wnn_forecast::Result<Series> {
    let text = std::fs::read_to_string(path)?;
    let header = text.lines().next().unwrap_or("");
    let column = if header.split(',').any(|h| h.trim() == "value") {
        ColumnSpec::Name("value".into())
    } else {
        ColumnSpec::Index(header.split(',').count().saturating_sub(1))
    };
    load_csv(path, &column, true)
}

#[test]
fn criterion_01_single_step_grids_coincide() {
    let id = "01 single-step grid equivalence";
    let _t = timing_guard();

    let mut rng = StdRng::seed_from_u64(11);
    let noisy = Series::new(
        (0..60)
            .map(|i| {
                30.0 + 5.0 * (2.0 * std::f64::consts::PI * i as f64 / 12.0).sin()
                    + rng.gen_range(0.0..2.0)
            })
            .collect(),
    )
    .unwrap();
    let cases = [synthetic_monthly(120), noisy, synthetic_monthly(40)];

    let started = Instant::now();
    let mut timed_secs = 0.0;
    for (idx, series) in cases.iter().enumerate() {
        let t = series.len();
        let i_sets = sets_from_fraction(t, 1, 0.3).unwrap();
        let run = |variant| {
            grid_search(
                series,
                &TuneOptions {
                    variant,
                    n: 1,
                    k_max: 10,
                    w_max: 15,
                    i_sets,
                    lambda_policy: LambdaPolicy::PerFold,
                    threads: 1,
                },
            )
            .unwrap()
        };
        let c = run(Variant::Cpto);
        let f = run(Variant::Fpto);
        if idx == 0 {
            timed_secs = started.elapsed().as_secs_f64();
        }
        if c.grid.cells != f.grid.cells {
            fail(id, &format!("grids differ cell-by-cell at T={t}"));
        }
        let same = c.p_star == f.p_star
            && c.k_star == f.k_star
            && c.mape_star.to_bits() == f.mape_star.to_bits();
        if !same {
            fail(
                id,
                &format!(
                    "winners differ at T={t}: ({},{},{}) vs ({},{},{})",
                    c.p_star, c.k_star, c.mape_star, f.p_star, f.k_star, f.mape_star
                ),
            );
        }
    }
    if timed_secs >= 60.0 {
        fail(id, &format!("120-point search took {timed_secs:.1} s >= 60 s"));
    }
    pass(
        id,
        &format!(
            "identical grids and winners on T=120/60/40; 120-point pair in {timed_secs:.2} s"
        ),
    );
}

#[test]
fn criterion_02_rank_weights_decreasing_normalized() {
    let id = "02 rank-weight suite";
    for k in 1..=100 {
        let w = roc_weights(k).unwrap().weights;
        if w.len() != k {
            fail(id, &format!("k={k}: wrong length {}", w.len()));
        }
        if !w.iter().all(|&x| x > 0.0) {
            fail(id, &format!("k={k}: non-positive weight"));
        }
        if !w.windows(2).all(|p| p[0] > p[1]) {
            fail(id, &format!("k={k}: not strictly decreasing"));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            fail(id, &format!("k={k}: sum {sum} deviates past 1e-12"));
        }
    }
    pass(id, "k=1..100 all positive, strictly decreasing, sum within 1e-12 of 1");
}

/// Independent ranking: materialize every candidate window, score it
/// against the query with plain left-to-right arithmetic, sort by
/// (distance, more recent index first), truncate to k.
fn oracle_rank(
    h: &[f64],
    candidates: &[usize],
    window_len: usize,
    query_start: usize,
    k: usize,
) -> Vec<(usize, f64)> {
    let query = &h[query_start..query_start + window_len];
    let mut scored: Vec<(usize, f64)> = candidates
        .iter()
        .map(|&j| {
            let w = &h[j - 1..j - 1 + window_len];
            let d2: f64 = w.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            (j, d2.sqrt())
        })
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
    scored.truncate(k);
    scored
}

#[test]
fn criterion_03_neighbor_search_matches_bruteforce_oracle() {
    let id = "03 neighbor-oracle equivalence";
    let _t = timing_guard();
    let mut rng = StdRng::seed_from_u64(23);
    let started = Instant::now();

    for case in 0..200 {
        let l: usize = rng.gen_range(30..=120);
        // Last quarter of the cases quantize values so exact distance
        // ties occur and the tie rule is genuinely exercised.
        let h: Vec<f64> = (0..l)
            .map(|_| {
                if case >= 150 {
                    (rng.gen_range(-4i32..=4) as f64) * 0.5
                } else {
                    rng.gen_range(-5.0..5.0)
                }
            })
            .collect();
        let n = rng.gen_range(1..=5usize);
        let stride1 = rng.gen_bool(0.5);

        let (entries, expected) = if stride1 {
            let p = rng.gen_range(1..=10.min(l - n - 1));
            let count = l - p - n + 1;
            let k = rng.gen_range(1..=8.min(count));
            let ns = cpto_neighbor_set(&h, p, k, n).unwrap();
            let candidates: Vec<usize> = (1..=count).collect();
            (ns.entries, oracle_rank(&h, &candidates, p, l - p, k))
        } else {
            let max_p = (l / n).saturating_sub(1).clamp(1, 6);
            let p = rng.gen_range(1..=max_p);
            let mut candidates = Vec::new();
            let mut j = (l - (p + 1) * n) as i64 + 1;
            while j >= 1 {
                candidates.push(j as usize);
                j -= n as i64;
            }
            let k = rng.gen_range(1..=8.min(candidates.len()));
            let ns = fpto_neighbor_set(&h, p, k, n).unwrap();
            (ns.entries, oracle_rank(&h, &candidates, n * p, l - n * p, k))
        };

        let got: Vec<(usize, f64)> = entries
            .iter()
            .map(|e| (e.candidate_index, e.distance))
            .collect();
        let exact = got.len() == expected.len()
            && got
                .iter()
                .zip(&expected)
                .all(|(a, b)| a.0 == b.0 && a.1.to_bits() == b.1.to_bits());
        if !exact {
            fail(
                id,
                &format!("case {case} (L={l}, n={n}): {got:?} != oracle {expected:?}"),
            );
        }
    }
    let secs = started.elapsed().as_secs_f64();
    if secs >= 30.0 {
        fail(id, &format!("took {secs:.1} s >= 30 s"));
    }
    pass(id, &format!("200/200 random cases match bitwise in {secs:.2} s"));
}

#[test]
fn criterion_04_transform_roundtrips() {
    let id = "04 transform roundtrips";
    let lambdas = [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
    // 121 log-spaced points spanning [0.1, 1000] exactly at the ends.
    for i in 0..=120 {
        let x = 0.1 * 10f64.powf(i as f64 * 4.0 / 120.0);
        for &lambda in &lambdas {
            let y = boxcox(x, lambda).unwrap();
            let back = inv_boxcox(y, lambda).unwrap();
            if ((back - x) / x).abs() > 1e-9 {
                fail(id, &format!("x={x}, lambda={lambda}: roundtrip {back}"));
            }
        }
    }

    let series = synthetic_monthly(100);
    let transformed: Vec<f64> = series.values().iter().map(|&v| boxcox(v, 0.5).unwrap()).collect();
    let d = difference(&transformed).unwrap();
    let restored = integrate(&d.differenced, transformed[0]);
    for (r, o) in restored.iter().zip(transformed.iter().skip(1)) {
        if (r - o).abs() > 1e-9 {
            fail(id, &format!("difference/integrate drifted: {r} vs {o}"));
        }
    }
    pass(
        id,
        "power-transform inverse within 1e-9 relative on [0.1,1000] x 6 lambdas; diff/integrate within 1e-9",
    );
}

#[test]
fn criterion_05_hand_traced_forecast() {
    let id = "05 hand-traced forecast";
    let series = Series::new(vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
    let config = WnnConfig {
        variant: Variant::Cpto,
        n: 1,
        p: 2,
        k: 1,
    };
    let result = engine::forecast(&series, &config, &BoxCoxParams::fixed(1.0), true).unwrap();

    if result.forecasts != vec![2.0] {
        fail(id, &format!("forecast {:?}, wanted exactly [2.0]", result.forecasts));
    }
    if result.diff_forecasts != vec![1.0] {
        fail(id, &format!("diff forecast {:?}, wanted [1.0]", result.diff_forecasts));
    }
    let picked = result.neighbor_set.entries[0].candidate_index;
    if picked != 5 {
        fail(id, &format!("tie broken to candidate {picked}, wanted most recent (5)"));
    }
    let mape = result.holdout_accuracy.as_ref().unwrap().mape_percent;
    if mape != 0.0 {
        fail(id, &format!("holdout MAPE {mape}, wanted exactly 0"));
    }
    pass(id, "alternating 10-point series: forecast 2, tie resolved to index 5, MAPE 0");
}

#[test]
fn criterion_06_spike_detection_and_clean_datasets() {
    let id = "06 spike detection";
    let series = Series::new(vec![1.0, 1.0, 1.0, 1.0, 9.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
    let report = detect_adjust_outliers(&series);
    if report.flagged_indices != vec![5] {
        fail(id, &format!("flags {:?}, wanted exactly [5]", report.flagged_indices));
    }
    if report.adjusted_series.values()[4] != 1.0 {
        fail(
            id,
            &format!("replacement {}, wanted 1", report.adjusted_series.values()[4]),
        );
    }

    let mut dataset_notes = Vec::new();
    for (env_key, rel, name) in [
        ("WNN_RETAIL_CSV", "data/retail_usa.csv", "retail"),
        ("WNN_MILK_CSV", "data/milk_uk.csv", "milk"),
    ] {
        match dataset(env_key, rel) {
            Some(path) => {
                let s = load_dataset(&path)
                    .unwrap_or_else(|e| fail(id, &format!("{name} dataset unreadable: {e}")));
                let flags = detect_adjust_outliers(&s).flagged_indices;
                if !flags.is_empty() {
                    fail(id, &format!("{name} dataset flagged {flags:?}, wanted none"));
                }
                dataset_notes.push(format!("{name} T={} clean", s.len()));
            }
            None => dataset_notes.push(format!("{name} SKIPPED (set {env_key} or add {rel})")),
        }
    }
    pass(
        id,
        &format!("synthetic spike flagged at 5 and replaced by 1; {}", dataset_notes.join("; ")),
    );
}

#[test]
fn criterion_07_retail_benchmark_reproduction() {
    let id = "07 retail single-step benchmark";
    let Some(path) = dataset("WNN_RETAIL_CSV", "data/retail_usa.csv") else {
        skip(
            id,
            "retail dataset not present; set WNN_RETAIL_CSV or add data/retail_usa.csv \
             (monthly series, T=338, with a 'value' column) to enable",
        );
        return;
    };
    let _t = timing_guard();
    let series = load_dataset(&path)
        .unwrap_or_else(|e| fail(id, &format!("retail dataset unreadable: {e}")));
    let t = series.len();
    let size_note = if t == 338 {
        String::from("T=338")
    } else {
        format!("T={t} (expected 338; tolerances may not transfer)")
    };

    let i_sets = sets_from_fraction(t, 1, 0.3).unwrap();
    let started = Instant::now();
    let result = grid_search(
        &series,
        &TuneOptions {
            variant: Variant::Cpto,
            n: 1,
            k_max: 10,
            w_max: 15,
            i_sets,
            lambda_policy: LambdaPolicy::PerFold,
            threads: 1,
        },
    )
    .unwrap_or_else(|e| fail(id, &format!("search failed: {e}")));
    let secs = started.elapsed().as_secs_f64();

    if secs > 2.0 * 2612.0 {
        fail(id, &format!("runtime {secs:.0} s exceeds the 5224 s budget"));
    }
    let reference = 1.308579;
    let delta = result.mape_star - reference;
    if delta.abs() > 0.2 {
        fail(
            id,
            &format!(
                "MAPE* {:.6} deviates {delta:+.6} from reference {reference} (limit 0.2)",
                result.mape_star
            ),
        );
    }
    let pk_note = if (result.p_star, result.k_star) == (14, 8) {
        String::from("(p*,k*)=(14,8) matches reference")
    } else {
        format!(
            "(p*,k*)=({},{}) MISMATCH vs reference (14,8) [recorded, tolerated]",
            result.p_star, result.k_star
        )
    };
    pass(
        id,
        &format!(
            "{size_note}, I={i_sets}: MAPE* {:.6} within 0.2 of {reference}; {pk_note}; {secs:.0} s",
            result.mape_star
        ),
    );
}

#[test]
fn criterion_08_stride_n_speedup() {
    let id = "08 stride-n relative speed";
    let _t = timing_guard();
    let series = synthetic_monthly(338);

    let timed = |variant, n, i_sets| -> f64 {
        let mut runs: Vec<f64> = (0..3)
            .map(|_| {
                grid_search(
                    &series,
                    &TuneOptions {
                        variant,
                        n,
                        k_max: 10,
                        w_max: 15,
                        i_sets,
                        lambda_policy: LambdaPolicy::PerFold,
                        threads: 1,
                    },
                )
                .unwrap()
                .wall_clock_seconds
            })
            .collect();
        runs.sort_by(f64::total_cmp);
        runs[1]
    };

    let mut total_stride1 = 0.0;
    let mut total_stride_n = 0.0;
    let mut details = Vec::new();
    for n in 3..=10 {
        let i_sets = sets_from_fraction(series.len(), n, 0.3).unwrap();
        let c = timed(Variant::Cpto, n, i_sets);
        let f = timed(Variant::Fpto, n, i_sets);
        let ratio = f / c;
        if ratio >= 1.0 {
            fail(id, &format!("n={n}: stride-n slower than stride-1 ({ratio:.2}x)"));
        }
        total_stride1 += c;
        total_stride_n += f;
        details.push(format!("n={n} {ratio:.2}"));
    }
    let aggregate = total_stride_n / total_stride1;
    println!("       per-horizon wall ratios: {}", details.join(", "));
    if aggregate > 0.75 {
        fail(
            id,
            &format!(
                "aggregate ratio {aggregate:.3} > 0.75 ({total_stride_n:.3}s vs {total_stride1:.3}s over n=3..10)"
            ),
        );
    }
    pass(
        id,
        &format!(
            "aggregate {total_stride_n:.3}s vs {total_stride1:.3}s = {aggregate:.3} <= 0.75 (medians of 3, single-threaded)"
        ),
    );
}

#[test]
fn criterion_09_thread_count_determinism() {
    let id = "09 thread-count determinism";
    let _t = timing_guard();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("series.csv");
    let mut csv = String::from("value\n");
    for v in synthetic_monthly(84).values() {
        csv.push_str(&format!("{v}\n"));
    }
    std::fs::write(&input, csv).unwrap();
    let input = input.to_str().unwrap();

    let run = |args: &[&str]| -> Vec<u8> {
        let out = Command::new(env!("CARGO_BIN_EXE_wnn"))
            .args(args)
            .env_remove("WNN_THREADS")
            .output()
            .unwrap();
        if out.status.code() != Some(0) {
            fail(
                id,
                &format!("run {args:?} exited {:?}", out.status.code()),
            );
        }
        out.stdout
    };
    // Numeric columns only: the trailing wall-clock column is timing,
    // not forecasting output, and legitimately varies between runs.
    let strip_ct = |bytes: &[u8]| -> Vec<u8> {
        String::from_utf8(bytes.to_vec())
            .unwrap()
            .lines()
            .map(|l| match l.rsplit_once(',') {
                Some((head, _)) => head.to_string(),
                None => l.to_string(),
            })
            .collect::<Vec<_>>()
            .join("\n")
            .into_bytes()
    };

    let tune = |threads: &str| {
        strip_ct(&run(&[
            "tune", "--input", input, "--horizons", "1..4", "--threads", threads,
        ]))
    };
    let t1 = tune("1");
    if tune("1") != t1 {
        fail(id, "two identical single-threaded tune runs differ");
    }
    if tune("2") != t1 || tune("8") != t1 {
        fail(id, "tune output changes with thread count");
    }

    let compare = |threads: &str| {
        run(&["compare", "--input", input, "--horizon", "4", "--threads", threads])
    };
    let c1 = compare("1");
    if compare("1") != c1 {
        fail(id, "two identical compare runs differ");
    }
    if compare("4") != c1 {
        fail(id, "compare output changes with thread count");
    }
    pass(id, "tune and compare byte-identical across threads 1/2/8 and repeat runs");
}

#[test]
fn criterion_10_baseline_sanity() {
    let id = "10 baseline sanity";
    let t_total = 72;
    let full: Vec<f64> = (0..t_total)
        .map(|i| 100.0 + 2.0 * i as f64 + 10.0 * (2.0 * std::f64::consts::PI * i as f64 / 12.0).sin())
        .collect();
    let train = Series::new(full[..60].to_vec()).unwrap();
    let model = hw_fit(&train, 12, SeasonalMode::Additive).unwrap();
    let forecasts = hw_forecast(&model, 12);
    let mape: f64 = forecasts
        .iter()
        .zip(&full[60..])
        .map(|(f, a)| ((f - a) / a).abs() * 100.0)
        .sum::<f64>()
        / 12.0;
    if mape >= 0.1 {
        fail(id, &format!("additive smoother MAPE {mape:.4}% >= 0.1% on exact linear+seasonal"));
    }

    let pattern = [5.0, 7.0, 4.0, 9.0, 6.0, 8.0, 3.0, 10.0, 5.5, 7.5, 4.5, 9.5];
    let periodic: Vec<f64> = (0..48).map(|i| pattern[i % 12]).collect();
    let train = Series::new(periodic[..36].to_vec()).unwrap();
    let naive = seasonal_naive(&train, 12, 12).unwrap();
    let naive_mape: f64 = naive
        .iter()
        .zip(&periodic[36..])
        .map(|(f, a)| ((f - a) / a).abs() * 100.0)
        .sum::<f64>()
        / 12.0;
    if naive_mape != 0.0 {
        fail(id, &format!("seasonal naive MAPE {naive_mape} != 0 on exact periodic series"));
    }
    pass(
        id,
        &format!("additive smoother MAPE {mape:.5}% < 0.1%; seasonal naive exactly 0"),
    );
}

//! Subcommand implementations. Each takes a resolved [`RunConfig`],
//! loads the series, runs the library, and emits results through
//! [`crate::output`]. Diagnostics go to stderr so stdout stays parseable.

use wnn_forecast::{
    compare_methods, detect_adjust_outliers, engine, grid_search, load_csv_full,
    select_lambda_guerrero, CompareOptions, Error, HwChoice, Method, Series, TuneOptions,
    Variant, WnnConfig, LAMBDA_INTERVAL,
};

use crate::config::{OutputFormat, RunConfig, VariantChoice};
use crate::output::{self, BenchRecord, ForecastOutput, PreprocessOutput};
use crate::CliError;

fn load_series(cfg: &RunConfig) -> Result<Series, CliError> {
    let series = load_csv_full(&cfg.input, &cfg.column, cfg.labels.as_ref(), true, b',')?;
    Ok(series.with_period(cfg.period)?)
}

/// True for errors that rule out one horizon without invalidating the
/// whole run: the grid has no feasible cell, or the series cannot carry
/// that many folds at that stride.
fn is_per_horizon(e: &Error) -> bool {
    matches!(
        e,
        Error::NoFeasibleCell | Error::Infeasible(_) | Error::InsufficientData { .. }
    )
}

pub fn cmd_preprocess(cfg: &RunConfig) -> Result<(), CliError> {
    let series = load_series(cfg)?;
    let report = detect_adjust_outliers(&series);
    if report.flagged_indices.is_empty() {
        eprintln!("no outliers flagged ({} observations)", series.len());
    } else {
        for (idx, orig) in report
            .flagged_indices
            .iter()
            .zip(report.original_values.iter())
        {
            let adjusted = report.adjusted_series.values()[idx - 1];
            eprintln!("outlier at position {idx}: {orig} -> {adjusted}");
        }
    }
    let contents = match cfg.format {
        OutputFormat::Csv => output::series_to_csv(
            report.adjusted_series.values(),
            report.adjusted_series.labels(),
        ),
        OutputFormat::Json => output::preprocess_to_json(&PreprocessOutput {
            flagged_indices: report.flagged_indices.clone(),
            original_values: report.original_values.clone(),
            values: report.adjusted_series.values().to_vec(),
            labels: report.adjusted_series.labels().map(<[String]>::to_vec),
        }),
    };
    output::write_output(cfg.output.as_deref(), &contents)
}

pub fn cmd_tune(cfg: &RunConfig) -> Result<(), CliError> {
    let series = load_series(cfg)?;
    let mut records = Vec::new();
    for &n in &cfg.horizons {
        let i_sets = cfg.sizing.folds_for(series.len(), n)?;
        for variant in cfg.variant.variants() {
            let opts = TuneOptions {
                variant,
                n,
                k_max: cfg.k_max,
                w_max: cfg.w_max,
                i_sets,
                lambda_policy: cfg.lambda_policy,
                threads: cfg.threads,
            };
            match grid_search(&series, &opts) {
                Ok(r) => records.push(BenchRecord {
                    horizon: n,
                    i_sets,
                    variant: variant.to_string(),
                    p_star: r.p_star,
                    k_star: r.k_star,
                    mape_star: r.mape_star,
                    ct_seconds: output::round2(r.wall_clock_seconds),
                }),
                Err(e) if is_per_horizon(&e) => {
                    eprintln!("horizon {n} {variant}: skipped ({e})");
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    if records.is_empty() {
        return Err(CliError::infeasible(
            "no requested horizon produced a feasible search grid".into(),
        ));
    }
    let contents = match cfg.format {
        OutputFormat::Csv => output::bench_to_csv(&records),
        OutputFormat::Json => output::bench_to_json(&records),
    };
    output::write_output(cfg.output.as_deref(), &contents)
}

pub fn cmd_forecast(cfg: &RunConfig, p: usize, k: usize) -> Result<(), CliError> {
    let n = match cfg.horizons.as_slice() {
        [n] => *n,
        _ => {
            return Err(CliError::usage(
                "forecast takes a single --horizon, not a range".into(),
            ))
        }
    };
    let variant = match cfg.variant {
        VariantChoice::Cpto => Variant::Cpto,
        VariantChoice::Fpto => Variant::Fpto,
        VariantChoice::Both => {
            return Err(CliError::usage(
                "forecast needs --variant cpto or --variant fpto".into(),
            ))
        }
    };
    let series = load_series(cfg)?;
    let lambda = select_lambda_guerrero(&series, cfg.period, LAMBDA_INTERVAL)?;
    let config = WnnConfig { variant, n, p, k };
    let result = engine::forecast(&series, &config, &lambda, false)?;
    eprintln!(
        "lambda = {} ({} neighbors over window {p})",
        result.lambda_used, k
    );
    let out = ForecastOutput {
        labels: future_labels(&series, n),
        forecasts: result.forecasts,
    };
    let contents = match cfg.format {
        OutputFormat::Csv => output::forecast_to_csv(&out),
        OutputFormat::Json => output::forecast_to_json(&out),
    };
    output::write_output(cfg.output.as_deref(), &contents)
}

pub fn cmd_compare(cfg: &RunConfig, methods_arg: Option<&str>) -> Result<(), CliError> {
    let methods = parse_methods(methods_arg.unwrap_or("cpto,fpto,hw,naive"), cfg)?;
    let series = load_series(cfg)?;
    let opts = CompareOptions {
        k_max: cfg.k_max,
        w_max: cfg.w_max,
        lambda_policy: cfg.lambda_policy,
        threads: cfg.threads,
    };
    let mut rows = Vec::new();
    for &n in &cfg.horizons {
        let i_sets = cfg.sizing.folds_for(series.len(), n)?;
        match compare_methods(&series, n, i_sets, &methods, &opts) {
            Ok(row) => rows.push(row),
            Err(e) if is_per_horizon(&e) => eprintln!("horizon {n}: skipped ({e})"),
            Err(e) => return Err(e.into()),
        }
    }
    if rows.is_empty() {
        return Err(CliError::infeasible(
            "no requested horizon could be scored".into(),
        ));
    }
    let rows = output::compare_rows(&rows);
    match cfg.format {
        OutputFormat::Csv => {
            let wide = output::compare_to_wide_csv(&rows)?;
            output::write_output(cfg.output.as_deref(), &wide)?;
            if let Some(path) = &cfg.output {
                let long = output::compare_to_long_csv(&rows);
                output::write_output(Some(&output::long_sibling(path)), &long)?;
            }
            Ok(())
        }
        OutputFormat::Json => {
            output::write_output(cfg.output.as_deref(), &output::compare_to_json(&rows))
        }
    }
}

fn parse_methods(s: &str, cfg: &RunConfig) -> Result<Vec<Method>, CliError> {
    let hw: HwChoice = cfg.seasonal.hw_choice();
    let mut methods = Vec::new();
    for name in s.split(',') {
        match name.trim() {
            "cpto" => methods.push(Method::CptoWnn),
            "fpto" => methods.push(Method::FptoWnn),
            "hw" => methods.push(Method::HoltWinters(hw)),
            "naive" => methods.push(Method::SeasonalNaive),
            other => {
                return Err(CliError::usage(format!(
                    "unknown method '{other}' (expected cpto, fpto, hw or naive)"
                )))
            }
        }
    }
    if methods.is_empty() {
        return Err(CliError::usage("--methods is empty".into()));
    }
    Ok(methods)
}

/// Labels for the n points after the series ends. Monthly "YYYY-MM"
/// labels are extrapolated; anything else falls back to the 1-based
/// position index.
fn future_labels(series: &Series, n: usize) -> Vec<String> {
    let t = series.len();
    let last_ym = series
        .labels()
        .and_then(|ls| ls.last())
        .and_then(|l| parse_year_month(l));
    match last_ym {
        Some((year, month)) => (1..=n)
            .map(|h| {
                let total = (year as i64) * 12 + (month as i64 - 1) + h as i64;
                format!("{:04}-{:02}", total.div_euclid(12), total.rem_euclid(12) + 1)
            })
            .collect(),
        None => (1..=n).map(|h| (t + h).to_string()).collect(),
    }
}

fn parse_year_month(s: &str) -> Option<(i32, u32)> {
    let (y, m) = s.split_once('-')?;
    if y.len() != 4 || m.len() != 2 {
        return None;
    }
    let year: i32 = y.parse().ok()?;
    let month: u32 = m.parse().ok()?;
    (1..=12).contains(&month).then_some((year, month))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monthly_labels_extrapolate_across_year_end() {
        let series = Series::new(vec![1.0, 2.0, 3.0])
            .unwrap()
            .with_labels(vec!["2019-10".into(), "2019-11".into(), "2019-12".into()])
            .unwrap();
        assert_eq!(
            future_labels(&series, 3),
            vec!["2020-01", "2020-02", "2020-03"]
        );
    }

    #[test]
    fn unlabeled_series_gets_position_labels() {
        let series = Series::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(future_labels(&series, 2), vec!["5", "6"]);
    }

    #[test]
    fn non_monthly_labels_fall_back_to_positions() {
        let series = Series::new(vec![1.0, 2.0])
            .unwrap()
            .with_labels(vec!["a".into(), "b".into()])
            .unwrap();
        assert_eq!(future_labels(&series, 1), vec!["3"]);
    }
}

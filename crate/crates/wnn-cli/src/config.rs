//! Run configuration: CLI flags merged with an optional flat key=value
//! config file, environment fallback, and documented defaults, in that
//! precedence order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use wnn_forecast::{ColumnSpec, LambdaPolicy};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantChoice {
    Cpto,
    Fpto,
    Both,
}

impl VariantChoice {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "cpto" => Ok(VariantChoice::Cpto),
            "fpto" => Ok(VariantChoice::Fpto),
            "both" => Ok(VariantChoice::Both),
            other => Err(CliError::usage(format!(
                "unknown variant '{other}' (expected cpto, fpto or both)"
            ))),
        }
    }

    pub fn variants(self) -> Vec<wnn_forecast::Variant> {
        match self {
            VariantChoice::Cpto => vec![wnn_forecast::Variant::Cpto],
            VariantChoice::Fpto => vec![wnn_forecast::Variant::Fpto],
            VariantChoice::Both => {
                vec![wnn_forecast::Variant::Cpto, wnn_forecast::Variant::Fpto]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeasonalChoice {
    Add,
    Mul,
    Auto,
}

impl SeasonalChoice {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "add" => Ok(SeasonalChoice::Add),
            "mul" => Ok(SeasonalChoice::Mul),
            "auto" => Ok(SeasonalChoice::Auto),
            other => Err(CliError::usage(format!(
                "unknown seasonal mode '{other}' (expected add, mul or auto)"
            ))),
        }
    }

    pub fn hw_choice(self) -> wnn_forecast::HwChoice {
        match self {
            SeasonalChoice::Add => wnn_forecast::HwChoice::Additive,
            SeasonalChoice::Mul => wnn_forecast::HwChoice::Multiplicative,
            SeasonalChoice::Auto => wnn_forecast::HwChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::usage(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// Per-horizon test-set sizing: a fraction of T, or an explicit fold
/// count. Exactly one is active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestSizing {
    Fraction(f64),
    Folds(usize),
}

impl TestSizing {
    pub fn folds_for(&self, t: usize, n: usize) -> wnn_forecast::Result<usize> {
        match self {
            TestSizing::Fraction(f) => wnn_forecast::sets_from_fraction(t, n, *f),
            TestSizing::Folds(i) => Ok(*i),
        }
    }
}

/// Everything a subcommand needs, fully resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub column: ColumnSpec,
    pub labels: Option<ColumnSpec>,
    pub period: usize,
    pub horizons: Vec<usize>,
    pub k_max: usize,
    pub w_max: usize,
    pub sizing: TestSizing,
    pub variant: VariantChoice,
    pub lambda_policy: LambdaPolicy,
    pub seasonal: SeasonalChoice,
    pub threads: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Raw option set shared by all subcommands before resolution. Every
/// field is optional so that explicit flags can be told apart from
/// config-file values and defaults.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct RawOptions {
    /// Input CSV file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Value column: header name or 0-based index (default "value").
    #[arg(long)]
    pub column: Option<String>,
    /// Optional label column: header name or 0-based index.
    #[arg(long)]
    pub labels: Option<String>,
    /// Observations per seasonal cycle (default 12).
    #[arg(long)]
    pub period: Option<usize>,
    /// Single forecast horizon.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Inclusive horizon range "a..b".
    #[arg(long)]
    pub horizons: Option<String>,
    /// Largest neighbor count searched (default 10).
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Largest window length searched (default 15).
    #[arg(long)]
    pub wmax: Option<usize>,
    /// Fraction of the series reserved for testing (default 0.3).
    #[arg(long, value_name = "FRACTION")]
    pub test_fraction: Option<f64>,
    /// Explicit number of rolling-origin folds (overrides the fraction).
    #[arg(long)]
    pub folds: Option<usize>,
    /// Candidate layout: cpto, fpto or both.
    #[arg(long)]
    pub variant: Option<String>,
    /// Box-Cox lambda policy: per-fold or global.
    #[arg(long, value_name = "POLICY")]
    pub lambda_policy: Option<String>,
    /// Holt-Winters seasonality: add, mul or auto.
    #[arg(long)]
    pub seasonal: Option<String>,
    /// Worker threads (1 = sequential; falls back to WNN_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Flat key=value config file supplying any of the above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parses the flat config file format: one `key = value` per line,
/// blank lines and '#' comments ignored.
fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!(
                "config file {} line {}: expected key=value, got '{raw}'",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_horizon_range(s: &str) -> Result<Vec<usize>, CliError> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| CliError::usage(format!("--horizons expects a..b, got '{s}'")))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("bad horizon range start '{a}'")))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("bad horizon range end '{b}'")))?;
    if a == 0 || b < a {
        return Err(CliError::usage(format!(
            "horizon range {a}..{b} must satisfy 1 <= a <= b"
        )));
    }
    Ok((a..=b).collect())
}

fn parse_from<T: std::str::FromStr>(value: &str, key: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::usage(format!("bad value '{value}' for {key}")))
}

impl RawOptions {
    /// Resolves flags against the config file, the WNN_THREADS fallback
    /// and the defaults. `default_horizons` supplies the horizon set
    /// when neither --horizon nor --horizons is given (None makes a
    /// horizon mandatory).
    pub fn resolve(&self, default_horizons: Option<Vec<usize>>) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };
        let file_get = |key: &str| file.get(key).map(String::as_str);

        let input = match (&self.input, file_get("input")) {
            (Some(p), _) => p.clone(),
            (None, Some(v)) => PathBuf::from(v),
            (None, None) => return Err(CliError::usage("--input is required".into())),
        };

        let column = match (&self.column, file_get("column")) {
            (Some(c), _) => ColumnSpec::parse(c),
            (None, Some(v)) => ColumnSpec::parse(v),
            (None, None) => ColumnSpec::Name("value".into()),
        };
        let labels = match (&self.labels, file_get("labels")) {
            (Some(c), _) => Some(ColumnSpec::parse(c)),
            (None, Some(v)) => Some(ColumnSpec::parse(v)),
            (None, None) => None,
        };

        let period = match (self.period, file_get("period")) {
            (Some(p), _) => p,
            (None, Some(v)) => parse_from(v, "period")?,
            (None, None) => 12,
        };
        if period == 0 {
            return Err(CliError::usage("--period must be >= 1".into()));
        }

        let horizon = match (self.horizon, file_get("horizon")) {
            (Some(h), _) => Some(h),
            (None, Some(v)) => Some(parse_from(v, "horizon")?),
            (None, None) => None,
        };
        let horizons_raw = match (&self.horizons, file_get("horizons")) {
            (Some(h), _) => Some(h.clone()),
            (None, Some(v)) => Some(v.to_string()),
            (None, None) => None,
        };
        let horizons = match (horizon, horizons_raw) {
            (Some(_), Some(_)) => {
                return Err(CliError::usage(
                    "--horizon and --horizons are mutually exclusive".into(),
                ))
            }
            (Some(h), None) => {
                if h == 0 {
                    return Err(CliError::usage("--horizon must be >= 1".into()));
                }
                vec![h]
            }
            (None, Some(r)) => parse_horizon_range(&r)?,
            (None, None) => default_horizons
                .ok_or_else(|| CliError::usage("--horizon is required".into()))?,
        };

        let k_max = match (self.kmax, file_get("kmax")) {
            (Some(k), _) => k,
            (None, Some(v)) => parse_from(v, "kmax")?,
            (None, None) => 10,
        };
        let w_max = match (self.wmax, file_get("wmax")) {
            (Some(w), _) => w,
            (None, Some(v)) => parse_from(v, "wmax")?,
            (None, None) => 15,
        };
        if k_max == 0 || w_max == 0 {
            return Err(CliError::usage("--kmax and --wmax must be >= 1".into()));
        }

        let test_fraction = match (self.test_fraction, file_get("test_fraction")) {
            (Some(f), _) => Some(f),
            (None, Some(v)) => Some(parse_from(v, "test_fraction")?),
            (None, None) => None,
        };
        let folds = match (self.folds, file_get("folds")) {
            (Some(i), _) => Some(i),
            (None, Some(v)) => Some(parse_from(v, "folds")?),
            (None, None) => None,
        };
        let sizing = match (test_fraction, folds) {
            (Some(_), Some(_)) => {
                return Err(CliError::usage(
                    "--test-fraction and --folds are mutually exclusive".into(),
                ))
            }
            (None, Some(i)) if i >= 1 => TestSizing::Folds(i),
            (None, Some(_)) => return Err(CliError::usage("--folds must be >= 1".into())),
            (Some(f), None) if f > 0.0 && f < 1.0 => TestSizing::Fraction(f),
            (Some(f), None) => {
                return Err(CliError::usage(format!(
                    "--test-fraction must lie in (0, 1), got {f}"
                )))
            }
            (None, None) => TestSizing::Fraction(0.3),
        };

        let variant = match (&self.variant, file_get("variant")) {
            (Some(v), _) => VariantChoice::parse(v)?,
            (None, Some(v)) => VariantChoice::parse(v)?,
            (None, None) => VariantChoice::Both,
        };

        let lambda_policy = match (&self.lambda_policy, file_get("lambda_policy")) {
            (Some(v), _) => parse_lambda_policy(v)?,
            (None, Some(v)) => parse_lambda_policy(v)?,
            (None, None) => LambdaPolicy::PerFold,
        };

        let seasonal = match (&self.seasonal, file_get("seasonal")) {
            (Some(v), _) => SeasonalChoice::parse(v)?,
            (None, Some(v)) => SeasonalChoice::parse(v)?,
            (None, None) => SeasonalChoice::Auto,
        };

        let threads = match (self.threads, file_get("threads")) {
            (Some(t), _) => t,
            (None, Some(v)) => parse_from(v, "threads")?,
            (None, None) => match std::env::var("WNN_THREADS") {
                Ok(v) => v.trim().parse().map_err(|_| {
                    CliError::usage(format!("bad WNN_THREADS value '{v}'"))
                })?,
                Err(_) => 1,
            },
        };

        let output = match (&self.output, file_get("output")) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(v)) => Some(PathBuf::from(v)),
            (None, None) => None,
        };

        let format = match (&self.format, file_get("format")) {
            (Some(f), _) => OutputFormat::parse(f)?,
            (None, Some(v)) => OutputFormat::parse(v)?,
            (None, None) => OutputFormat::Csv,
        };

        Ok(RunConfig {
            input,
            column,
            labels,
            period,
            horizons,
            k_max,
            w_max,
            sizing,
            variant,
            lambda_policy,
            seasonal,
            threads,
            output,
            format,
        })
    }
}

fn parse_lambda_policy(s: &str) -> Result<LambdaPolicy, CliError> {
    match s {
        "per-fold" | "per_fold" => Ok(LambdaPolicy::PerFold),
        "global" => Ok(LambdaPolicy::Global),
        other => Err(CliError::usage(format!(
            "unknown lambda policy '{other}' (expected per-fold or global)"
        ))),
    }
}

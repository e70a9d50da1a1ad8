//! Command-line flags, the optional key=value config file, and the resolved
//! per-run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "pie",
    version,
    about = "Per-observation key-driver attribution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every row and write a JSON driver report.
    Score(Flags),
    /// Estimate a global importance vector from labeled data.
    Importance(Flags),
    /// Fit local surrogate explanations for every row.
    Explain(Flags),
    /// Explain every row, then greedily pick a covering subset of rows.
    Pick(Flags),
    /// Write per-row bar-chart data and the normalized global importance.
    PlotData(Flags),
}

impl Command {
    pub fn parts(&self) -> (Action, &Flags) {
        match self {
            Command::Score(f) => (Action::Score, f),
            Command::Importance(f) => (Action::Importance, f),
            Command::Explain(f) => (Action::Explain, f),
            Command::Pick(f) => (Action::Pick, f),
            Command::PlotData(f) => (Action::PlotData, f),
        }
    }
}

/// Subcommand tag carried by [`RunConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Score,
    Importance,
    Explain,
    Pick,
    PlotData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Standardized,
    Raw,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Standardized => "standardized",
            Mode::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ols,
    Corr,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// key=value file supplying defaults for any flag below
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// feature CSV (for `importance`, must also hold the target column)
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// importance CSV with header `feature,importance`
    #[arg(long)]
    pub importance: Option<PathBuf>,
    /// target column name
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub k_features: Option<usize>,
    #[arg(long)]
    pub kernel_width: Option<f64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// comma-separated row ids
    #[arg(long)]
    pub rows: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// also write plot data next to the score report
    #[arg(long)]
    pub emit_plot_data: bool,
    /// the first data column holds row ids
    #[arg(long)]
    pub row_ids: bool,
}

pub const DEFAULT_TOP_K: usize = 3;
pub const DEFAULT_BUDGET: usize = 5;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub struct LimeConfig {
    pub samples: usize,
    pub k_features: usize,
    pub kernel_width: Option<f64>,
    pub seed: u64,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Action,
    pub data: Option<PathBuf>,
    pub importance: Option<PathBuf>,
    pub target: Option<String>,
    pub mode: Mode,
    pub top_k: usize,
    pub method: Method,
    pub lime: LimeConfig,
    pub budget: usize,
    pub rows: Option<Vec<String>>,
    pub output: Option<PathBuf>,
    pub emit_plot_data: bool,
    pub row_ids: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "data",
    "importance",
    "target",
    "mode",
    "top-k",
    "method",
    "samples",
    "k-features",
    "kernel-width",
    "budget",
    "seed",
    "rows",
    "output",
    "emit-plot-data",
    "row-ids",
];

/// Parses `key = value` lines; blank lines and `#` comments are ignored.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Input(format!("config line {}: expected key=value", no + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::Input(format!(
                "config line {}: unknown key '{key}'",
                no + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.parse()
        .map_err(|_| CliError::Input(format!("config: invalid value '{raw}' for '{key}'")))
}

fn parse_bool(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Input(format!(
            "config: invalid boolean '{raw}' for '{key}'"
        ))),
    }
}

fn parse_enum<T: ValueEnum>(key: &str, raw: &str) -> Result<T, CliError> {
    T::from_str(raw, true)
        .map_err(|_| CliError::Input(format!("config: invalid value '{raw}' for '{key}'")))
}

impl RunConfig {
    /// Merges command-line flags over config-file values and applies defaults.
    pub fn resolve(subcommand: Action, flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Input(format!("cannot read config {}: {e}", path.display()))
                })?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        let get = |k: &str| file.get(k).map(String::as_str);

        let pick_path = |flag: &Option<PathBuf>, key: &str| {
            flag.clone().or_else(|| get(key).map(PathBuf::from))
        };
        let mode = match (flags.mode, get("mode")) {
            (Some(m), _) => m,
            (None, Some(raw)) => parse_enum("mode", raw)?,
            (None, None) => Mode::Standardized,
        };
        let method = match (flags.method, get("method")) {
            (Some(m), _) => m,
            (None, Some(raw)) => parse_enum("method", raw)?,
            (None, None) => Method::Ols,
        };
        macro_rules! num {
            ($flag:expr, $key:literal, $default:expr) => {
                match ($flag, get($key)) {
                    (Some(v), _) => v,
                    (None, Some(raw)) => parse_value($key, raw)?,
                    (None, None) => $default,
                }
            };
        }
        let top_k = num!(flags.top_k, "top-k", DEFAULT_TOP_K);
        if top_k == 0 {
            return Err(CliError::Input("--top-k must be at least 1".into()));
        }
        let kernel_width = match (flags.kernel_width, get("kernel-width")) {
            (Some(w), _) => Some(w),
            (None, Some(raw)) => Some(parse_value("kernel-width", raw)?),
            (None, None) => None,
        };
        let lime = LimeConfig {
            samples: num!(flags.samples, "samples", 500),
            k_features: num!(flags.k_features, "k-features", 3),
            kernel_width,
            seed: num!(flags.seed, "seed", DEFAULT_SEED),
        };
        let rows = flags
            .rows
            .clone()
            .or_else(|| get("rows").map(str::to_string))
            .map(|s| {
                s.split(',')
                    .map(|r| r.trim().to_string())
                    .filter(|r| !r.is_empty())
                    .collect()
            });
        let emit_plot_data = flags.emit_plot_data
            || get("emit-plot-data")
                .map(|v| parse_bool("emit-plot-data", v))
                .transpose()?
                .unwrap_or(false);
        let row_ids = flags.row_ids
            || get("row-ids")
                .map(|v| parse_bool("row-ids", v))
                .transpose()?
                .unwrap_or(false);

        Ok(Self {
            subcommand,
            data: pick_path(&flags.data, "data"),
            importance: pick_path(&flags.importance, "importance"),
            target: flags
                .target
                .clone()
                .or_else(|| get("target").map(str::to_string)),
            mode,
            top_k,
            method,
            lime,
            budget: num!(flags.budget, "budget", DEFAULT_BUDGET),
            rows,
            output: pick_path(&flags.output, "output"),
            emit_plot_data,
            row_ids,
        })
    }
}

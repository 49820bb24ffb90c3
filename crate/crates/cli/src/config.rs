use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};

use crate::CliError;

/// Seed used when neither a flag nor a config file sets one.
pub const DEFAULT_SEED: u64 = 20_100_401;
pub const DEFAULT_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    MonteCarlo,
    Qcb,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// config file, then to the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub n_good: Option<u64>,
    #[arg(long)]
    pub n_bad: Option<u64>,
    /// Squared overlap of a good spin's two record states
    #[arg(long)]
    pub gamma2_good: Option<f64>,
    /// Squared overlap of a bad spin's two record states
    #[arg(long)]
    pub gamma2_bad: Option<f64>,
    /// Probability of pointer state 0
    #[arg(long)]
    pub p0: Option<f64>,
    /// Information deficit in (0, 1]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Smallest fragment size on a curve
    #[arg(long)]
    pub fmin: Option<u64>,
    /// Largest fragment size on a curve [default: environment size]
    #[arg(long)]
    pub fmax: Option<u64>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Monte Carlo samples per fragment size [default: 10000]
    #[arg(long)]
    pub samples: Option<u64>,
    /// Monte Carlo seed [default: 20100401]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat key=value file supplying defaults for any of these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Grid axes for `sweep`, as comma-separated lists.
#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub n_bad_grid: Option<String>,
    #[arg(long)]
    pub gamma2_good_grid: Option<String>,
    #[arg(long)]
    pub delta_grid: Option<String>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_good: u64,
    pub n_bad: u64,
    pub gamma2_good: f64,
    pub gamma2_bad: f64,
    pub p0: f64,
    pub delta: f64,
    pub fmin: u64,
    pub fmax: Option<u64>,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub n_bad_grid: Option<Vec<u64>>,
    pub gamma2_good_grid: Option<Vec<f64>>,
    pub delta_grid: Option<Vec<f64>>,
}

#[derive(Debug, Default)]
struct FileConfig {
    run: RunArgs,
    grids: GridArgs,
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Input(format!("config line {line}: cannot parse {key} = {value:?}")))
}

fn parse_enum<T: ValueEnum>(line: usize, key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, true).map_err(|_| CliError::Input(format!("config line {line}: unknown {key} {value:?}")))
}

fn parse_config_text(text: &str) -> Result<FileConfig, CliError> {
    let mut cfg = FileConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("config line {n}: expected key=value")))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let run = &mut cfg.run;
        match key.as_str() {
            "n_good" => run.n_good = Some(parse_value(n, &key, value)?),
            "n_bad" => run.n_bad = Some(parse_value(n, &key, value)?),
            "gamma2_good" => run.gamma2_good = Some(parse_value(n, &key, value)?),
            "gamma2_bad" => run.gamma2_bad = Some(parse_value(n, &key, value)?),
            "p0" => run.p0 = Some(parse_value(n, &key, value)?),
            "delta" => run.delta = Some(parse_value(n, &key, value)?),
            "fmin" => run.fmin = Some(parse_value(n, &key, value)?),
            "fmax" => run.fmax = Some(parse_value(n, &key, value)?),
            "method" => run.method = Some(parse_enum(n, &key, value)?),
            "samples" => run.samples = Some(parse_value(n, &key, value)?),
            "seed" => run.seed = Some(parse_value(n, &key, value)?),
            "out" => run.out = Some(PathBuf::from(value)),
            "format" => run.format = Some(parse_enum(n, &key, value)?),
            "n_bad_grid" => cfg.grids.n_bad_grid = Some(value.to_string()),
            "gamma2_good_grid" => cfg.grids.gamma2_good_grid = Some(value.to_string()),
            "delta_grid" => cfg.grids.delta_grid = Some(value.to_string()),
            _ => return Err(CliError::Input(format!("config line {n}: unknown key {key:?}"))),
        }
    }
    Ok(cfg)
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_grid<T: FromStr>(name: &str, text: &str) -> Result<Vec<T>, CliError> {
    let values: Result<Vec<T>, _> = text.split(',').map(|v| v.trim().parse::<T>()).collect();
    match values {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::Input(format!("malformed {name}: {text:?}"))),
    }
}

impl RunConfig {
    /// Flags over config file over defaults.
    pub fn resolve(args: &RunArgs, grids: &GridArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let f = &file.run;
        let grid = |flag: &Option<String>, from_file: &Option<String>| flag.clone().or_else(|| from_file.clone());
        Ok(RunConfig {
            n_good: args.n_good.or(f.n_good).unwrap_or(2),
            n_bad: args.n_bad.or(f.n_bad).unwrap_or(4),
            gamma2_good: args.gamma2_good.or(f.gamma2_good).unwrap_or(0.0),
            gamma2_bad: args.gamma2_bad.or(f.gamma2_bad).unwrap_or(1.0),
            p0: args.p0.or(f.p0).unwrap_or(0.5),
            delta: args.delta.or(f.delta).unwrap_or(0.1),
            fmin: args.fmin.or(f.fmin).unwrap_or(0),
            fmax: args.fmax.or(f.fmax),
            method: args.method.or(f.method).unwrap_or(Method::Exact),
            samples: args.samples.or(f.samples).unwrap_or(DEFAULT_SAMPLES),
            seed: args.seed.or(f.seed).unwrap_or(DEFAULT_SEED),
            out: args.out.clone().or_else(|| f.out.clone()),
            format: args.format.or(f.format),
            n_bad_grid: grid(&grids.n_bad_grid, &file.grids.n_bad_grid)
                .map(|g| parse_grid("n_bad_grid", &g))
                .transpose()?,
            gamma2_good_grid: grid(&grids.gamma2_good_grid, &file.grids.gamma2_good_grid)
                .map(|g| parse_grid("gamma2_good_grid", &g))
                .transpose()?,
            delta_grid: grid(&grids.delta_grid, &file.grids.delta_grid)
                .map(|g| parse_grid("delta_grid", &g))
                .transpose()?,
        })
    }
}

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use chaff::crosscheck::{validate_instance, ValidationOptions, ValidationSummary};
use chaff::oracle::{Correlations, OracleLimits};
use chaff::{
    avg_holevo_exact, definition_ratio, holevo_asymptotic, mc_avg_holevo, min_definition_ratio, Deficit,
    EnvironmentSpec, InfoMethod, Oracle, RedundancyReport,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, Method, RunConfig};
use crate::output::{fmt_g, fmt_opt, open_sink, write_csv, write_json};
use crate::CliError;

fn spec_of(cfg: &RunConfig) -> Result<EnvironmentSpec, CliError> {
    Ok(EnvironmentSpec::new(cfg.n_good, cfg.n_bad, cfg.gamma2_good, cfg.gamma2_bad, cfg.p0)?)
}

fn flags_text(report: &RedundancyReport) -> String {
    report
        .validity_flags
        .iter()
        .map(|f| serde_json::to_value(f).expect("unit variant").as_str().unwrap_or_default().to_string())
        .collect::<Vec<_>>()
        .join(";")
}

const REPORT_HEADER: [&str; 9] = [
    "f_delta",
    "f_delta_interpolated",
    "r_avg",
    "r_max_discrete",
    "r_max_continuous",
    "r_qcb",
    "r_qcb_expanded",
    "ratio_avg_over_max",
    "validity_flags",
];

fn report_fields(r: &RedundancyReport) -> Vec<String> {
    vec![
        r.f_delta.to_string(),
        fmt_g(r.f_delta_interpolated),
        fmt_g(r.r_avg),
        fmt_opt(r.r_max_discrete),
        fmt_g(r.r_max_continuous),
        fmt_opt(r.r_qcb),
        fmt_opt(r.r_qcb_expanded),
        fmt_opt(r.ratio_avg_over_max),
        flags_text(r),
    ]
}

pub fn cmd_redundancy(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = spec_of(cfg)?;
    let report = RedundancyReport::compute(&spec, Deficit::new(cfg.delta)?)?;
    let mut sink = open_sink(cfg.out.as_deref(), false)?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&mut *sink, &report),
        Format::Csv => write_csv(&mut *sink, Some(&REPORT_HEADER), &[report_fields(&report)]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub fragment_size: u64,
    pub avg_holevo_bits: f64,
    pub avg_mi_bits: Option<f64>,
    pub qcb_holevo_bits: f64,
    pub method: &'static str,
    pub stderr: Option<f64>,
}

pub const CURVE_HEADER: [&str; 6] = [
    "fragment_size",
    "avg_holevo_bits",
    "avg_mi_bits",
    "qcb_holevo_bits",
    "method",
    "stderr",
];

pub fn curve_rows(cfg: &RunConfig) -> Result<Vec<CurveRow>, CliError> {
    let spec = spec_of(cfg)?;
    let fmax = cfg.fmax.unwrap_or(spec.n_total());
    if cfg.fmin > fmax || fmax > spec.n_total() {
        return Err(CliError::Input(format!(
            "fragment range {}..={fmax} does not fit an environment of {}",
            cfg.fmin,
            spec.n_total()
        )));
    }
    let sizes: Vec<u64> = (cfg.fmin..=fmax).collect();
    let qcb = |f: u64| holevo_asymptotic(&spec, f).value();
    let rows = match cfg.method {
        Method::Exact | Method::Qcb => {
            let (method, exact) = match cfg.method {
                Method::Exact => (InfoMethod::Exact, true),
                _ => (InfoMethod::QcbAsymptotic, false),
            };
            sizes
                .par_iter()
                .map(|&f| {
                    let avg = if exact { avg_holevo_exact(&spec, f)?.value() } else { qcb(f) };
                    Ok(CurveRow {
                        fragment_size: f,
                        avg_holevo_bits: avg,
                        avg_mi_bits: None,
                        qcb_holevo_bits: qcb(f),
                        method: method.label(),
                        stderr: None,
                    })
                })
                .collect::<Result<Vec<_>, chaff::Error>>()?
        }
        Method::MonteCarlo => sizes
            .par_iter()
            .map(|&f| {
                let e = mc_avg_holevo(&spec, f, cfg.samples, cfg.seed)?;
                Ok(CurveRow {
                    fragment_size: f,
                    avg_holevo_bits: e.estimate.value(),
                    avg_mi_bits: None,
                    qcb_holevo_bits: qcb(f),
                    method: InfoMethod::MonteCarlo.label(),
                    stderr: Some(e.stderr),
                })
            })
            .collect::<Result<Vec<_>, chaff::Error>>()?,
        Method::Oracle => {
            let oracle = Oracle::new(OracleLimits::from_env());
            let state = oracle.build_from_spec(&spec)?;
            let mut rows = Vec::with_capacity(sizes.len());
            for &f in &sizes {
                let all = oracle.all_fragments(&state, f as usize)?;
                let mean = |pick: fn(&Correlations) -> f64| all.iter().map(pick).sum::<f64>() / all.len() as f64;
                rows.push(CurveRow {
                    fragment_size: f,
                    avg_holevo_bits: mean(|c| c.holevo.value()),
                    avg_mi_bits: Some(mean(|c| c.mutual_information.value())),
                    qcb_holevo_bits: qcb(f),
                    method: InfoMethod::Oracle.label(),
                    stderr: None,
                });
            }
            rows
        }
    };
    Ok(rows)
}

pub fn cmd_curve(cfg: &RunConfig) -> Result<(), CliError> {
    let rows = curve_rows(cfg)?;
    let mut sink = open_sink(cfg.out.as_deref(), false)?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(&mut *sink, &rows),
        Format::Csv => {
            let records: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.fragment_size.to_string(),
                        fmt_g(r.avg_holevo_bits),
                        fmt_opt(r.avg_mi_bits),
                        fmt_g(r.qcb_holevo_bits),
                        r.method.to_string(),
                        fmt_opt(r.stderr),
                    ]
                })
                .collect();
            write_csv(&mut *sink, Some(&CURVE_HEADER), &records)
        }
    }
}

pub fn cmd_validate(cfg: &RunConfig, tolerance_override: Option<f64>) -> Result<ValidationSummary, CliError> {
    let spec = spec_of(cfg)?;
    let oracle = Oracle::new(OracleLimits::from_env());
    let options = ValidationOptions { tolerance_override };
    let summary = validate_instance(&spec, Deficit::new(cfg.delta)?, &oracle, options)?;
    let mut sink = open_sink(cfg.out.as_deref(), false)?;
    write_json(&mut *sink, &summary)?;
    Ok(summary)
}

pub const SWEEP_HEADER: [&str; 18] = [
    "n_good",
    "n_bad",
    "gamma2_good",
    "gamma2_bad",
    "p0",
    "delta",
    "status",
    "f_delta",
    "f_delta_interpolated",
    "r_avg",
    "r_max_discrete",
    "r_max_continuous",
    "r_qcb",
    "r_qcb_expanded",
    "ratio_avg_over_max",
    "validity_flags",
    "definition_ratio",
    "min_definition_ratio",
];

/// Number of leading columns identifying a grid point.
const SWEEP_KEY_COLUMNS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridPoint {
    n_bad: u64,
    gamma2_good: f64,
    delta: f64,
}

fn sweep_grid(cfg: &RunConfig) -> Vec<GridPoint> {
    let n_bads = cfg.n_bad_grid.clone().unwrap_or_else(|| vec![cfg.n_bad]);
    let gs = cfg.gamma2_good_grid.clone().unwrap_or_else(|| vec![cfg.gamma2_good]);
    let deltas = cfg.delta_grid.clone().unwrap_or_else(|| vec![cfg.delta]);
    let mut points = Vec::with_capacity(n_bads.len() * gs.len() * deltas.len());
    for &n_bad in &n_bads {
        for &gamma2_good in &gs {
            for &delta in &deltas {
                points.push(GridPoint {
                    n_bad,
                    gamma2_good,
                    delta,
                });
            }
        }
    }
    points
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    n_good: u64,
    n_bad: u64,
    gamma2_good: f64,
    gamma2_bad: f64,
    p0: f64,
    delta: f64,
    status: &'static str,
    #[serde(flatten)]
    report: Option<RedundancyReport>,
    definition_ratio: f64,
    min_definition_ratio: f64,
}

impl SweepRow {
    fn fields(&self) -> Vec<String> {
        let mut row = vec![
            self.n_good.to_string(),
            self.n_bad.to_string(),
            fmt_g(self.gamma2_good),
            fmt_g(self.gamma2_bad),
            fmt_g(self.p0),
            fmt_g(self.delta),
            self.status.to_string(),
        ];
        match &self.report {
            Some(r) => row.extend(report_fields(r)),
            None => row.extend(std::iter::repeat_n(String::new(), REPORT_HEADER.len())),
        }
        row.push(fmt_g(self.definition_ratio));
        row.push(fmt_g(self.min_definition_ratio));
        row
    }
}

fn sweep_row(cfg: &RunConfig, p: GridPoint) -> Result<SweepRow, chaff::Error> {
    let spec = EnvironmentSpec::new(cfg.n_good, p.n_bad, p.gamma2_good, cfg.gamma2_bad, cfg.p0)?;
    let deficit = Deficit::new(p.delta)?;
    let (status, report) = match RedundancyReport::compute(&spec, deficit) {
        Ok(report) => ("ok", Some(report)),
        Err(chaff::Error::DeficitUnreachable { .. }) => ("deficit_unreachable", None),
        Err(e) => return Err(e),
    };
    Ok(SweepRow {
        n_good: spec.n_good,
        n_bad: spec.n_bad,
        gamma2_good: spec.gamma2_good,
        gamma2_bad: spec.gamma2_bad,
        p0: spec.p0,
        delta: deficit.value(),
        status,
        report,
        definition_ratio: definition_ratio(spec.gamma2_good, deficit)?.value,
        min_definition_ratio: min_definition_ratio(deficit),
    })
}

/// Keys of the rows already present in a sweep file. Fails if the file
/// holds a different table.
fn existing_keys(path: &Path) -> Result<Option<HashSet<Vec<String>>>, CliError> {
    if !path.exists() || fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true) {
        return Ok(None);
    }
    let mut reader = csv::Reader::from_path(path).map_err(CliError::from_csv)?;
    let header = reader.headers().map_err(CliError::from_csv)?.clone();
    if header.iter().ne(SWEEP_HEADER.iter().copied()) {
        return Err(CliError::Input(format!(
            "{} already holds a table with a different header",
            path.display()
        )));
    }
    let mut keys = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(CliError::from_csv)?;
        keys.insert(record.iter().take(SWEEP_KEY_COLUMNS).map(str::to_string).collect());
    }
    Ok(Some(keys))
}

/// Appends rows for every grid point not yet present in `--out`, in grid
/// order; without `--out` the full table goes to stdout.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let points = sweep_grid(cfg);
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&p| sweep_row(cfg, p))
        .collect::<Result<_, _>>()?;
    if cfg.format.unwrap_or(Format::Csv) == Format::Json {
        let mut sink = open_sink(cfg.out.as_deref(), false)?;
        return write_json(&mut *sink, &rows);
    }
    let rows: Vec<Vec<String>> = rows.iter().map(SweepRow::fields).collect();
    let existing = match cfg.out.as_deref() {
        Some(path) => existing_keys(path)?,
        None => None,
    };
    let header = if existing.is_none() { Some(&SWEEP_HEADER[..]) } else { None };
    let fresh: Vec<Vec<String>> = rows
        .into_iter()
        .filter(|row| {
            existing
                .as_ref()
                .is_none_or(|keys| !keys.contains(&row[..SWEEP_KEY_COLUMNS].to_vec()))
        })
        .collect();
    let mut sink = open_sink(cfg.out.as_deref(), existing.is_some())?;
    write_csv(&mut *sink, header, &fresh)
}

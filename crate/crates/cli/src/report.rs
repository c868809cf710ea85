//! Spectrum table and summary document written by `run`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use critsweep::model::HorizonReport;
use critsweep::pipeline::{Conservation, RunOutcome, Verdict};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const TABLE_HEADER: &str = "k,p_phi,p_pi,p_grad,in_fit_window";
pub const TABLE_FILE: &str = "spectrum.csv";
pub const SUMMARY_STEM: &str = "summary";

#[derive(Debug, Serialize)]
pub struct WindowSummary {
    pub k_lo: f64,
    pub k_hi: f64,
    pub points: usize,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub config: &'a RunConfig,
    pub case: &'static str,
    pub nu: f64,
    pub nu_dual: f64,
    pub fit_window: WindowSummary,
    pub indices: &'a Verdict,
    pub conservation: &'a Conservation,
    pub warnings: &'a [String],
    pub horizon: &'a HorizonReport,
}

impl<'a> Summary<'a> {
    pub fn new(config: &'a RunConfig, out: &'a RunOutcome) -> Self {
        let points = out.spectrum.k_values.iter().filter(|&&k| out.window.contains(k)).count();
        Summary {
            config,
            case: out.case.tag(),
            nu: out.spectrum.predicted.nu,
            nu_dual: out.spectrum.predicted.nu_dual,
            fit_window: WindowSummary { k_lo: out.window.k_lo, k_hi: out.window.k_hi, points },
            indices: &out.verdict,
            conservation: &out.conservation,
            warnings: &out.warnings,
            horizon: &out.horizon,
        }
    }
}

/// Comma-separated spectrum, 17 significant digits.
pub fn spectrum_table(out: &RunOutcome) -> String {
    let sp = &out.spectrum;
    let mut table = String::from(TABLE_HEADER);
    table.push('\n');
    for (i, inside) in sp.in_window().into_iter().enumerate() {
        let _ = writeln!(
            table,
            "{:.16e},{:.16e},{:.16e},{:.16e},{inside}",
            sp.k_values[i], sp.p_phi[i], sp.p_pi[i], sp.p_grad[i]
        );
    }
    table
}

pub fn render<T: Serialize>(value: &T, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => serde_json::to_string_pretty(value)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Output(e.to_string())),
        Format::Toml => toml::to_string(value).map_err(|e| CliError::Output(e.to_string())),
    }
}

/// Write both files into `config.output`, returning their paths.
pub fn write(config: &RunConfig, out: &RunOutcome) -> Result<(PathBuf, PathBuf), CliError> {
    let dir = config.output.as_path();
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let table = dir.join(TABLE_FILE);
    fs::write(&table, spectrum_table(out)).map_err(|e| io_error(&table, e))?;
    let summary = dir.join(format!("{SUMMARY_STEM}.{}", config.format.extension()));
    fs::write(&summary, render(&Summary::new(config, out), config.format)?).map_err(|e| io_error(&summary, e))?;
    Ok((table, summary))
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

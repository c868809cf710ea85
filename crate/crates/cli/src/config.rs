//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use critsweep::model::{
    log_spaced_grid, Preset, SweepScenario, DEFAULT_K_MAX, DEFAULT_K_MIN, DEFAULT_POINTS_PER_DECADE,
    DEFAULT_T_F, DEFAULT_T_IN,
};
use critsweep::pipeline::{RunParams, DEFAULT_TOL};
use critsweep::spectrum::{fit_mask, DEFAULT_EPS_ADIAB, DEFAULT_EPS_FROZEN};
use critsweep::{dynamics, model};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_OUTPUT: &str = "critsweep-output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Toml,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Toml => "toml",
        }
    }
}

/// Every setting, each optional. Used both for the file and for the flags.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Named preset (see `presets`); excludes --a/--b/--alpha0/--beta0
    #[arg(long)]
    pub preset: Option<String>,
    /// Exponent of α = alpha0·|t|^a
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Exponent of β = beta0·|t|^b
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_in: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_f: Option<f64>,
    #[arg(long)]
    pub k_min: Option<f64>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub points_per_decade: Option<u32>,
    /// Integration tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Modes count as frozen when k|τ(t_f)| is below this
    #[arg(long)]
    pub eps_frozen: Option<f64>,
    /// Modes count as adiabatic at the start when k|τ(t_in)| exceeds this
    #[arg(long)]
    pub eps_adiab: Option<f64>,
    /// Output directory for the spectrum table and summary
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Summary format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Settings {
    /// Fields set in `over` win.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            preset: over.preset.or(self.preset),
            a: over.a.or(self.a),
            b: over.b.or(self.b),
            alpha0: over.alpha0.or(self.alpha0),
            beta0: over.beta0.or(self.beta0),
            t_in: over.t_in.or(self.t_in),
            t_f: over.t_f.or(self.t_f),
            k_min: over.k_min.or(self.k_min),
            k_max: over.k_max.or(self.k_max),
            points_per_decade: over.points_per_decade.or(self.points_per_decade),
            tol: over.tol.or(self.tol),
            eps_frozen: over.eps_frozen.or(self.eps_frozen),
            eps_adiab: over.eps_adiab.or(self.eps_adiab),
            output: over.output.or(self.output),
            format: over.format.or(self.format),
        }
    }

    pub fn from_file(path: &Path) -> Result<Settings, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Config file plus flags, as accepted by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// TOML file with any of the flag names as keys (underscored)
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

impl ConfigArgs {
    pub fn merged(&self) -> Result<Settings, CliError> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        Ok(base.overlay(self.settings.clone()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Selection {
    Preset { name: Preset, a: f64, b: f64 },
    Custom { a: f64, b: f64, alpha0: f64, beta0: f64 },
}

impl Selection {
    /// `(alpha0, a, beta0, b)`
    fn coefficients(&self) -> (f64, f64, f64, f64) {
        match *self {
            Selection::Preset { a, b, .. } => (1.0, a, 1.0, b),
            Selection::Custom { a, b, alpha0, beta0 } => (alpha0, a, beta0, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub selection: Selection,
    pub t_in: f64,
    pub t_f: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub points_per_decade: u32,
    pub tol: f64,
    pub eps_frozen: f64,
    pub eps_adiab: f64,
    #[serde(skip)]
    pub output: PathBuf,
    #[serde(skip)]
    pub format: Format,
}

fn selection(s: &Settings) -> Result<Selection, String> {
    let custom = [("a", s.a), ("b", s.b), ("alpha0", s.alpha0), ("beta0", s.beta0)];
    match &s.preset {
        Some(name) => {
            let given: Vec<&str> = custom.iter().filter(|(_, v)| v.is_some()).map(|(n, _)| *n).collect();
            if !given.is_empty() {
                return Err(format!("preset `{name}` cannot be combined with {}", given.join(", ")));
            }
            let preset: Preset = name.parse().map_err(|e: critsweep::Error| e.to_string())?;
            let (a, b) = preset.exponents();
            Ok(Selection::Preset { name: preset, a, b })
        }
        None => match (s.a, s.b) {
            (Some(a), Some(b)) => Ok(Selection::Custom {
                a,
                b,
                alpha0: s.alpha0.unwrap_or(1.0),
                beta0: s.beta0.unwrap_or(1.0),
            }),
            _ => Err("choose a preset or give both exponents a and b".to_string()),
        },
    }
}

impl RunConfig {
    /// Fill defaults without validating values.
    pub fn resolve(s: &Settings) -> Result<RunConfig, CliError> {
        Ok(RunConfig {
            selection: selection(s).map_err(CliError::Config)?,
            t_in: s.t_in.unwrap_or(DEFAULT_T_IN),
            t_f: s.t_f.unwrap_or(DEFAULT_T_F),
            k_min: s.k_min.unwrap_or(DEFAULT_K_MIN),
            k_max: s.k_max.unwrap_or(DEFAULT_K_MAX),
            points_per_decade: s.points_per_decade.unwrap_or(DEFAULT_POINTS_PER_DECADE),
            tol: s.tol.unwrap_or(DEFAULT_TOL),
            eps_frozen: s.eps_frozen.unwrap_or(DEFAULT_EPS_FROZEN),
            eps_adiab: s.eps_adiab.unwrap_or(DEFAULT_EPS_ADIAB),
            output: s.output.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
            format: s.format.unwrap_or_default(),
        })
    }

    /// Every violated invariant; empty for a runnable configuration.
    pub fn violations(&self) -> Vec<String> {
        let (alpha0, a, beta0, b) = self.selection.coefficients();
        let grid = log_spaced_grid(self.k_min, self.k_max, self.points_per_decade);
        let mut out = SweepScenario::diagnose(alpha0, a, beta0, b, self.t_in, self.t_f, grid.as_deref().unwrap_or(&[1.0]));
        if let Err(e) = grid {
            out.push(e.to_string());
        }
        if !(dynamics::MIN_TOL..=dynamics::MAX_TOL).contains(&self.tol) {
            out.push(format!(
                "tol must lie in [{:e}, {:e}], got {:e}",
                dynamics::MIN_TOL,
                dynamics::MAX_TOL,
                self.tol
            ));
        }
        if !(self.eps_frozen > 0.0 && self.eps_frozen < 1.0) {
            out.push(format!("eps_frozen must lie in (0, 1), got {}", self.eps_frozen));
        }
        if !(self.eps_adiab > 1.0 && self.eps_adiab.is_finite()) {
            out.push(format!("eps_adiab must exceed 1, got {}", self.eps_adiab));
        }
        out
    }

    pub fn scenario(&self) -> Result<SweepScenario, CliError> {
        let violations = self.violations();
        if !violations.is_empty() {
            return Err(CliError::Config(violations.join("; ")));
        }
        let (alpha0, a, beta0, b) = self.selection.coefficients();
        let grid = log_spaced_grid(self.k_min, self.k_max, self.points_per_decade)?;
        Ok(SweepScenario::new(alpha0, a, beta0, b, self.t_in, self.t_f, grid)?)
    }

    pub fn params(&self) -> Result<RunParams, CliError> {
        Ok(RunParams {
            scenario: self.scenario()?,
            tol: self.tol,
            eps_frozen: self.eps_frozen,
            eps_adiab: self.eps_adiab,
        })
    }

    /// Warnings about a valid configuration: poor adiabatic start at the
    /// ends of the grid, no plateau, and an empty fit window.
    pub fn warnings(&self) -> Vec<String> {
        let Ok(s) = self.scenario() else {
            return Vec::new();
        };
        let mut out = critsweep::pipeline::scenario_warnings(&s).unwrap_or_default();
        if let Err(e) = fit_mask(&s, self.eps_frozen, self.eps_adiab) {
            out.push(e.to_string());
        }
        out
    }
}

/// One line per preset for `presets`.
pub fn preset_table() -> Vec<String> {
    Preset::ALL
        .iter()
        .map(|p| {
            let (a, b) = p.exponents();
            let nu = model::predicted_nu(a, b).expect("presets are valid");
            format!(
                "{:<11} a={a:<3} b={b:<3} case {:<6} nu={nu:.4}  {}",
                p.name(),
                p.scenario().case().tag(),
                p.description()
            )
        })
        .collect()
}

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use critsweep::pipeline;

mod config;
mod report;

use config::{ConfigArgs, RunConfig};

/// Caps the number of worker threads used for mode evolution.
const THREADS_VAR: &str = "CRITSWEEP_THREADS";

#[derive(Parser)]
#[command(version, about = "Mode dynamics and frozen spectra for sweeps through a critical point")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve all modes, fit the frozen spectra and write the reports
    Run(ConfigArgs),
    /// Check a configuration without running it
    Validate(ConfigArgs),
    /// List the built-in presets
    Presets,
    /// Print the horizon report of a configuration
    Horizon(ConfigArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error(transparent)]
    Core(#[from] critsweep::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use critsweep::Error as E;
        match self {
            CliError::Config(_) | CliError::Output(_) => 1,
            CliError::Core(E::EmptyWindow(_) | E::DegenerateFit(_)) => 3,
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Core(E::NonPositivePower { .. } | E::Domain(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(args: &ConfigArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.merged()?)?;
    let params = cfg.params()?;
    let out = pipeline::run(&params)?;
    let (table, summary) = report::write(&cfg, &out)?;

    println!("case {}  nu = {:.6}  nu' = {:.6}", out.case.tag(), out.spectrum.predicted.nu, out.spectrum.predicted.nu_dual);
    println!("fit window {:.6e} < k < {:.6e}", out.window.k_lo, out.window.k_hi);
    let v = &out.verdict;
    for (name, c) in [("phi", &v.phi), ("pi", &v.pi), ("grad", &v.grad)] {
        let status = match (c.applicable, c.pass) {
            (false, _) => "n/a",
            (true, true) => "ok",
            (true, false) => "MISMATCH",
        };
        println!(
            "{name:<5} predicted {:+.6}  fitted {:+.6} ± {:.1e}  {status}",
            c.predicted, c.fitted, c.stderr
        );
    }
    println!(
        "max Wronskian drift {:.2e}, max RS deviation {:.2e} (bound {:.0e})",
        out.conservation.max_wronskian_drift, out.conservation.max_rs_deviation, out.conservation.bound
    );
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {} and {}", table.display(), summary.display());
    Ok(())
}

fn validate(args: &ConfigArgs) {
    let cfg = args.merged().and_then(|s| RunConfig::resolve(&s));
    let (violations, warnings) = match &cfg {
        Ok(cfg) => (cfg.violations(), cfg.warnings()),
        Err(CliError::Config(msg)) => (vec![msg.clone()], Vec::new()),
        Err(e) => (vec![e.to_string()], Vec::new()),
    };
    for v in &violations {
        println!("violation: {v}");
    }
    for w in &warnings {
        println!("warning: {w}");
    }
    if violations.is_empty() {
        println!("configuration is valid");
    }
}

fn horizon(args: &ConfigArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.merged()?)?;
    let report = cfg.scenario()?.horizon_report()?;
    print!("{}", report::render(&report, cfg.format)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Run(args) => run(args),
        Command::Validate(args) => {
            validate(args);
            Ok(())
        }
        Command::Presets => {
            for line in config::preset_table() {
                println!("{line}");
            }
            Ok(())
        }
        Command::Horizon(args) => horizon(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

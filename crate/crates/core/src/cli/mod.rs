//! Command-line experiment runner: TOML configuration, validation, and one
//! subcommand per sweep, each writing CSVs plus a `manifest.toml`.

mod config;
mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{
    apply_overrides, BasisSection, BurgersSection, Command, ConditionSection, ConvergenceSection, Diagnostic,
    ExperimentConfig, FourierSection,
};
pub use run::{basis_label, output_paths, run, ManifestRun, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<Diagnostic>),
    #[error("run failed: {0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) | CliError::Io(_) => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rbf-fr", version, about = "Flux reconstruction experiments with polynomial and RBF bases")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// First Burgers seed when no explicit list is given.
    #[arg(long, global = true)]
    pub seed_base: Option<u64>,
    /// Override a config key, e.g. `--set basis.n_s=[3,4]`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CliCommand {
    /// Error norms of the linear cases over meshes and bases.
    Convergence,
    /// Dispersion/dissipation, combined analysis and maximum dissipation.
    Fourier,
    /// Summation-by-parts error norms.
    Sbp,
    /// Condition numbers of the direct and stable Gaussian bases.
    Condition,
    /// Burgers turbulence ensemble spectra.
    Burgers,
    /// Check the configuration and list every problem.
    Validate,
}

impl CliCommand {
    fn command(self) -> Option<Command> {
        match self {
            CliCommand::Convergence => Some(Command::Convergence),
            CliCommand::Fourier => Some(Command::Fourier),
            CliCommand::Sbp => Some(Command::Sbp),
            CliCommand::Condition => Some(Command::Condition),
            CliCommand::Burgers => Some(Command::Burgers),
            CliCommand::Validate => None,
        }
    }
}

/// Builds the effective config: file, then `--set`, then dedicated flags,
/// then the subcommand.
pub fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(vec![Diagnostic { field: "--config".into(), message: format!("{}: {e}", p.display()) }]))?,
        None => String::new(),
    };
    let text = apply_overrides(&text, &cli.overrides).map_err(|d| CliError::Config(vec![d]))?;
    let mut cfg = ExperimentConfig::from_toml(&text)
        .map_err(|e| CliError::Config(vec![Diagnostic { field: "config".into(), message: e.to_string() }]))?;
    if let Some(b) = cli.seed_base {
        cfg.burgers.seed_base = b;
    }
    if let Some(c) = cli.command.command() {
        cfg.command = c;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    if cli.command == CliCommand::Validate {
        let d = cfg.validate();
        return if d.is_empty() {
            println!("configuration is valid for '{}'", cfg.command);
            Ok(())
        } else {
            Err(CliError::Config(d))
        };
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Config(vec![Diagnostic { field: "--threads".into(), message: "must be positive".into() }]));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    let manifest = pool.install(|| run(&cfg, &cli.out))?;
    for f in &manifest.outputs {
        println!("{}", cli.out.join(f).display());
    }
    println!("{}", cli.out.join("manifest.toml").display());
    Ok(())
}

/// Parses `args` (including the program name) and runs; returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

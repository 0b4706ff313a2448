//! Experiment driver behind the `gaugefree` binary.
//!
//! A run reads a TOML [`RunConfig`], applies command-line overrides,
//! validates, executes one [`Command`] and emits a [`RunReport`]. Exit codes:
//! 0 when every check passes, 1 on an invariant violation, 2 on a
//! configuration error.

mod config;
mod jobs;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use config::{
    ConfigError, EvolutionConfig, Limits, ModelConfig, OutputConfig, OutputFormat, Overrides, ProjectorConfig,
    QuadratureConfig, RunConfig, SamplingConfig, SpectrumConfig, Tolerances, SCHEMA_VERSION,
};
pub use jobs::{run, Command};
pub use report::{Artifact, Check, Criterion, RunReport, ARTIFACT};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gaugefree", version, about = "Gauge-invariant projectors and evolution kernels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report file; standard output when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Overrides the sampling seed and any Monte Carlo quadrature seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the truncation degree.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Adds wall-clock times to the report (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timings: bool,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            cutoff: self.cutoff,
            output: self.output.clone(),
            format: self.format,
        }
    }

    /// Loads, overrides and validates the configuration.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_path(path)?,
            None => RunConfig::default(),
        };
        cfg.apply(&self.overrides());
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses arguments, runs and writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    let cfg = match cli.resolve() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return EXIT_CONFIG;
        }
    };
    let report = run(cli.command, &cfg, cli.timings);
    let text = report.render(cfg.output.format);
    match &cfg.output.path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("configuration error: cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => print!("{text}"),
    }
    for check in report.failures() {
        match &check.note {
            Some(note) => eprintln!("violated: {} ({note})", check.name),
            None => eprintln!("violated: {} (value {:?})", check.name, check.value),
        }
    }
    if report.passed {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}

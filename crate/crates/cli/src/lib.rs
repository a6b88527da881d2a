//! Command-line driver: configuration, verification suites and report emission.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Exit status: all checks passed.
pub const EXIT_PASS: i32 = 0;
/// At least one check exceeded its tolerance.
pub const EXIT_FAIL: i32 = 1;
/// Invalid configuration, input or resource request.
pub const EXIT_CONFIG: i32 = 2;
/// Numerical failure: branch cut, non-convergence.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cubic-weil",
    version,
    about = "Finite-truncation checks for the cubic Dirac operator on loop-group modules"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; defaults apply to missing keys.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Base seed; each suite draws from its own stream of it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for reports.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Truncation window half-width N.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Level k.
    #[arg(long, global = true)]
    pub k: Option<i64>,
    /// Print nothing but errors.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run every suite; writes verify.json.
    Verify,
    /// Spectrum of D_A; writes spectrum.csv and spectrum.json.
    Spectrum,
    /// Kernel decomposition and isotropy of D_A; writes kernel.json.
    Kernel,
    /// Groupoid cocycle residuals; writes cocycle.json.
    Cocycle,
    /// Central extension and BCH coefficient table; writes extension.json.
    Extension,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Spectrum => "spectrum",
            Command::Kernel => "kernel",
            Command::Cocycle => "cocycle",
            Command::Extension => "extension",
        }
    }
}

/// Parses, loads the configuration and dispatches; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let overrides =
        config::Overrides { seed: cli.global.seed, out: cli.global.out.clone(), n: cli.global.n, k: cli.global.k };
    let cfg = match config::RunConfig::load(cli.global.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    commands::dispatch(cli.command, &cfg, cli.global.quiet)
}

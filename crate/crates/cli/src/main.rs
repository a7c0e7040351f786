mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use config::RunConfig;
use run::Context;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tabular,
    Structured,
}

/// Spectral solver for the radially symmetric, spatially homogeneous,
/// non-cutoff Boltzmann equation with Maxwellian molecules.
#[derive(Debug, Parser)]
#[command(name = "radboltz", version)]
struct Cli {
    /// TOML run configuration; omitted keys take the defaults listed below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Exit with status 1 if any verification or certificate fails.
    #[arg(long, global = true)]
    strict: bool,
    /// Overrides `seed` from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit only tabular (CSV) or only structured (JSON) artifacts; both by default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and emit the eigenvalue and coupling tables.
    Spectrum,
    /// Solve the cascade and emit the trajectory, profiles and decay report.
    Solve,
    /// Run the verification suites on built or snapshot tables.
    Verify {
        /// Structured spectrum snapshot to verify instead of building tables.
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Summarize a previous run directory.
    Report {
        /// Run directory; defaults to the configured output directory.
        dir: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let ctx = Context {
        config,
        format: cli.format,
    };
    match &cli.command {
        Command::Spectrum => run::spectrum(&ctx),
        Command::Solve => run::solve(&ctx),
        Command::Verify { tables } => run::verify(&ctx, tables.as_deref()),
        Command::Report { dir } => {
            let dir = dir.clone().unwrap_or_else(|| ctx.config.output_dir.clone());
            run::report(&ctx, &dir)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let help = format!(
        "Configuration keys and their defaults:\n\n{}\nExit status: 0 success, 1 verification failure under --strict, \
         2 configuration error, 3 numerical failure.",
        RunConfig::default().to_toml()
    );
    let matches = Cli::command().after_long_help(help).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let strict = cli.strict;
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if strict => ExitCode::from(1),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("radboltz: {e}");
            ExitCode::from(match e {
                Failure::Config(_) => 2,
                Failure::Numerical(_) => 3,
            })
        }
    }
}

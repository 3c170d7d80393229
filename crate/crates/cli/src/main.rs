mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};
use error::CliError;

/// Minimal surfaces through planar geodesics via the Björling problem.
#[derive(Debug, Parser)]
#[command(name = "bjorling", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the surface and write OBJ/PLY meshes with a summary.
    Generate {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the part with x3 >= 0.
        #[arg(long)]
        half_cut: bool,
    },
    /// Degeneracy report for an epitrochoid geodesic.
    Analyze(CommonArgs),
    /// Minimality, geodesic, conformality and symmetry residuals.
    Verify(CommonArgs),
    /// Orders of zeros and poles of g and eta, compared with the printed tables.
    Table(CommonArgs),
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("BJORLING_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Invalid(format!("BJORLING_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Invalid(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Generate { common, half_cut } => commands::generate(&RunConfig::resolve(&common, half_cut)?),
        Command::Analyze(common) => commands::analyze(&RunConfig::resolve(&common, false)?),
        Command::Verify(common) => commands::verify(&RunConfig::resolve(&common, false)?),
        Command::Table(common) => commands::table(&RunConfig::resolve(&common, false)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

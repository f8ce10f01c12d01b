//! `abmix`: command-line front end for the dual-solenoid Aharonov-Bohm
//! simulator.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 physical precondition
//! failure, 4 I/O failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{RunConfig, Seed};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "abmix", version, about = "Aharonov-Bohm shifts behind two solenoids fed by one superposed electron")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// RNG seed, overriding `seed` in the configuration.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Output directory, overriding `output_dir` in the configuration.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Also write tables and patterns as CSV.
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wavelength, flux, phase and fringe shift for solenoid 1 alone.
    Phase,
    /// Both solenoids energized together: fluxes add.
    Classical,
    /// Outcome distribution and means when a superposed electron feeds the solenoids.
    Mixture,
    /// Seeded Monte Carlo detection run; writes report.txt and histograms.
    Experiment,
    /// Internal-electron current density and its mixture decomposition.
    Current,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = Some(Seed(seed));
    }
    if let Some(out) = cli.out {
        config.output_dir = Some(out);
    }

    let outcome = match cli.command {
        Command::Phase => commands::phase(&config, cli.csv)?,
        Command::Classical => commands::classical(&config, cli.csv)?,
        Command::Mixture => commands::mixture(&config, cli.csv)?,
        Command::Experiment => commands::experiment(&config)?,
        Command::Current => commands::current(&config)?,
    };

    print!("{}", outcome.text);
    let mut artifacts = outcome.artifacts;
    if !artifacts.is_empty() {
        artifacts.add("config.toml", config.to_toml().into_bytes());
        for path in artifacts.commit(&config.output_dir())? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("abmix: {e}");
            e.exit_code()
        }
    }
}

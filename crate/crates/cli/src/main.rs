//! `friedrichs`: command-line front end for the N-level Friedrichs model.

mod commands;
mod config;
mod error;
mod output;
mod reproduce;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Artifacts;

#[derive(Debug, Parser)]
#[command(name = "friedrichs", version, about = "Bound states, dynamics and Markovian limit of the N-level Friedrichs model")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "FRIEDRICHS_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate Σ/Δ, Γ, K and K' on an energy grid.
    Spectrum(commands::SpectrumArgs),
    /// Count and solve the bound states.
    BoundStates(commands::BoundStatesArgs),
    /// Exact survival probability of a discrete excitation.
    Dynamics(commands::DynamicsArgs),
    /// Markovian effective Hamiltonian, eigenvalue flows and decay curves.
    Markovian(commands::MarkovianArgs),
    /// Build and print a waveguide model document.
    Waveguide(commands::WaveguideArgs),
    /// Brute-force lattice propagation of a waveguide model.
    Oracle(commands::OracleArgs),
    /// Regenerate the figure data sets.
    Reproduce(reproduce::ReproduceArgs),
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let config = RunConfig::load(cli.config.as_deref())?;
    let dir = cli
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let mut out = Artifacts::new(&dir);
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, &config, &mut out)?,
        Command::BoundStates(a) => commands::bound_states(a, &config, &mut out)?,
        Command::Dynamics(a) => commands::dynamics(a, &config, &mut out)?,
        Command::Markovian(a) => commands::markovian(a, &config, &mut out)?,
        Command::Waveguide(a) => commands::waveguide(a, &config, &mut out)?,
        Command::Oracle(a) => commands::oracle(a, &config, &mut out)?,
        Command::Reproduce(a) => reproduce::run(a, &config, &mut out)?,
    }
    out.write()
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn report(dir: &Path, err: &CliError) {
    eprintln!("error: {err}");
    if matches!(err, CliError::Numerical(_)) {
        let body = serde_json::to_string_pretty(&err.diagnostic()).expect("JSON values serialize");
        let _ = std::fs::create_dir_all(dir);
        let _ = std::fs::write(dir.join("error.json"), body + "\n");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // a second initialisation is the only failure mode and is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            report(&out_dir(&cli), &err);
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

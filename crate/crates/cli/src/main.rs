//! `revivalkit`: batch runs of the spectral and revival pipelines.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{RunConfig, Settings};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "revivalkit", version, about = "Wave-packet revivals near a hyperbolic saddle")]
struct Cli {
    /// JSON file with run settings; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Model (and optionally direct) eigenvalues in [-h, h].
    Spectrum(RunConfig),
    /// Packet coefficients around the level nearest h E.
    Packet(RunConfig),
    /// Return amplitude and its first-order approximant on hyperbolic times.
    Evolve(RunConfig),
    /// Second-order approximant up to the revival time, with fractional clones.
    Revival(RunConfig),
    /// Fractional-revival coefficients for each (p, q).
    Gauss(RunConfig),
    /// Periods and counts across several values of h, with fits.
    Sweep(RunConfig),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let (name, flags) = match cli.command {
        Command::Spectrum(c) => ("spectrum", c),
        Command::Packet(c) => ("packet", c),
        Command::Evolve(c) => ("evolve", c),
        Command::Revival(c) => ("revival", c),
        Command::Gauss(c) => ("gauss", c),
        Command::Sweep(c) => ("sweep", c),
    };
    let config = base.overlay(flags);
    if name == "gauss" {
        let out = config::output_dir(&config, commands::default_out());
        return commands::gauss(&config, out);
    }
    let settings = Settings::resolve(config, commands::regime_of(name), commands::default_out())?;
    match name {
        "spectrum" => commands::spectrum(&settings),
        "packet" => commands::packet(&settings),
        "evolve" => commands::evolve(&settings),
        "revival" => commands::revival(&settings),
        _ => commands::sweep(&settings),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("revivalkit: {e}");
            e.exit_code()
        }
    }
}

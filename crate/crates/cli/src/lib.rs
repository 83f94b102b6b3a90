//! Command-line front end for `tfmetro-core`: basis and spectrum tables,
//! figure data, and superresolution sweeps with reproducible manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

use clap::{Parser, Subcommand};

use config::{Command, Format, RunConfig, Settings};
use error::Result;
use output::{Payload, Table};

#[derive(Debug, Parser)]
#[command(name = "tfmetro", version, about = "Time-frequency metrology with prolate spheroidal wave functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Eigenvalues λₙ(c) for each c.
    Spectrum(Settings),
    /// ψ₂ against its Hermite–Gauss counterpart.
    Fig1(Settings),
    /// Ground eigenvalue λ₀ over a grid of c.
    Lambda0(Settings),
    /// Efficiency factor, its bounds and Fisher information for two pulses.
    Superres(Settings),
    /// Full basis document for a single c.
    Basis(Settings),
}

impl Sub {
    pub fn split(self) -> (Command, Settings) {
        match self {
            Sub::Spectrum(s) => (Command::Spectrum, s),
            Sub::Fig1(s) => (Command::Fig1, s),
            Sub::Lambda0(s) => (Command::Lambda0, s),
            Sub::Superres(s) => (Command::Superres, s),
            Sub::Basis(s) => (Command::Basis, s),
        }
    }
}

fn plot_script(cfg: &RunConfig, table: &Table) -> Option<String> {
    let out = cfg.out.as_deref()?;
    let name = Path::new(out.file_name()?);
    match cfg.command {
        Command::Spectrum => output::gnuplot_script(name, table, "n", &["lambda"]),
        Command::Fig1 => output::gnuplot_script(name, table, "t", &["psi2", "psi2_hg"]),
        Command::Lambda0 => output::gnuplot_script(name, table, "c", &["lambda0"]),
        Command::Superres => output::gnuplot_script(name, table, "c", &["A", "bound_phi2", "bound_lambda0"]),
        Command::Basis => output::gnuplot_script(name, table, "n", &["lambda"]),
    }
}

/// Resolves the configuration, computes, and writes data plus manifest.
pub fn run(cli: Cli) -> Result<()> {
    let (command, settings) = cli.command.split();
    let cfg = config::resolve(command, settings)?;
    let payload = commands::run_command(&cfg)?;
    let data = output::render(&cfg, &payload)?;
    let plot = match (&payload, cfg.plot_script && cfg.format == Format::Csv) {
        (Payload::Table(t), true) => plot_script(&cfg, t),
        _ => None,
    };
    output::emit(&cfg, &data, plot)
}

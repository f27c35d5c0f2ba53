use clap::{Parser, Subcommand};

use bosim_cli::config::{
    load_spec, CertifySpec, EstimateSpec, FigureSpec, MatrixSpec, SampleSpec, WitnessSpec,
};
use bosim_cli::{commands, Result};

/// Sampling-model simulation and suppression-law certification for
/// multimode interferometers.
#[derive(Parser)]
#[command(name = "bosim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and save a mode-transformation matrix (fourier, haar, walk,
    /// perturbed).
    Matrix(MatrixSpec),
    /// Draw a seeded event batch under one of the sampling models.
    Sample(SampleSpec),
    /// Check a stored batch against the suppression law.
    Certify(CertifySpec),
    /// Coincidence, clouding and mean-occupation witnesses of a batch or an
    /// exact model.
    Witness(WitnessSpec),
    /// Analytic calculators: distinguishability bound, deviation estimates,
    /// required runs.
    Estimate(EstimateSpec),
    /// Emit the survey data tables (fig2a, fig2b, fig3, fig4) as CSV.
    Figure(FigureSpec),
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Matrix(mut spec) => {
            if let Some(path) = spec.config.take() {
                spec = spec.merge(load_spec(&path)?);
            }
            commands::matrix::run(spec.resolve()?)
        }
        Command::Sample(mut spec) => {
            if let Some(path) = spec.config.take() {
                spec = spec.merge(load_spec(&path)?);
            }
            commands::sample::run(spec.resolve()?)
        }
        Command::Certify(mut spec) => {
            if let Some(path) = spec.config.take() {
                spec = spec.merge(load_spec(&path)?);
            }
            commands::certify::run(spec.resolve()?)
        }
        Command::Witness(mut spec) => {
            if let Some(path) = spec.config.take() {
                spec = spec.merge(load_spec(&path)?);
            }
            commands::witness::run(spec.resolve()?)
        }
        Command::Estimate(mut spec) => {
            if let Some(path) = spec.config.take() {
                spec = spec.merge(load_spec(&path)?);
            }
            commands::estimate::run(spec.resolve()?)
        }
        Command::Figure(mut spec) => {
            if let Some(path) = spec.config.take() {
                spec = spec.merge(load_spec(&path)?);
            }
            commands::figure::run(spec.resolve()?)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

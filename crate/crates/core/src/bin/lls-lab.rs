//! `lls-lab <subcommand> --config <path> [--set key=value ...] [--out <dir>]`
//!
//! Exit status: 0 success, 1 configuration or I/O error, 2 numerical instability,
//! 3 pole guard or sphere constraint, 4 insufficient resolution.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use lls_core::io::{init_threads_from_env, load_config_with, run, Experiment};

#[derive(Parser)]
#[command(
    name = "lls-lab",
    version,
    about = "Numerical laboratory for Landau-Lifshitz dynamics with spin-transfer torque"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override one config key, e.g. `--set grid.n=32`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "lls-lab-out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the LLS equation for a magnetization field.
    SimulateLls(Common),
    /// March the chart equation with exponential time differencing.
    SimulateGl(Common),
    /// Solve the chart equation by Picard iteration of the Duhamel map.
    Picard(Common),
    /// Residual check of projected LLS trajectories against the chart equation.
    CheckEquivalence(Common),
    /// Dyadic space-time norms of a stored snapshot or generated datum.
    Norms(Common),
    /// Empirical estimate checks.
    Verify {
        #[command(subcommand)]
        which: Verify,
    },
    /// Convergence phase diagram over damping and amplitude.
    Sweep(Common),
}

#[derive(Subcommand)]
enum Verify {
    Strichartz(Common),
    Linear(Common),
    Nonlinear(Common),
    Contraction(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = match cli.command {
        Command::SimulateLls(c) => (Experiment::SimulateLls, c),
        Command::SimulateGl(c) => (Experiment::SimulateGl, c),
        Command::Picard(c) => (Experiment::Picard, c),
        Command::CheckEquivalence(c) => (Experiment::CheckEquivalence, c),
        Command::Norms(c) => (Experiment::Norms, c),
        Command::Sweep(c) => (Experiment::Sweep, c),
        Command::Verify { which } => match which {
            Verify::Strichartz(c) => (Experiment::VerifyStrichartz, c),
            Verify::Linear(c) => (Experiment::VerifyLinear, c),
            Verify::Nonlinear(c) => (Experiment::VerifyNonlinear, c),
            Verify::Contraction(c) => (Experiment::VerifyContraction, c),
        },
    };
    let result = init_threads_from_env()
        .and_then(|_| load_config_with(&common.config, Some(experiment), &common.set))
        .and_then(|cfg| run(&cfg, &common.out));
    match result {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            println!("manifest: {}", outcome.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lls-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line front end: plan, verify or cross-check a scenario file.

mod commands;
mod failure;
mod output;
mod scenario;
mod thresholds;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use failure::Failure;
use scenario::{Overrides, Scenario};
use thresholds::Thresholds;

#[derive(Parser)]
#[command(
    name = "rigidplan",
    version,
    about = "Energy-optimal motion of rigid planar formations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan and write trajectory.csv and summary.json
    Plan {
        #[command(flatten)]
        common: Common,
        /// Output directory (created if missing)
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Plan and check rigidity and optimality residuals
    Verify {
        #[command(flatten)]
        common: Common,
        /// One limit for all residuals, or key=value pairs
        #[arg(long)]
        thresholds: Option<Thresholds>,
    },
    /// Solve in full coordinates and compare with the closed form
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Time knots of the direct transcription
        #[arg(long, default_value_t = 50)]
        knots: usize,
        /// Outer augmented-Lagrangian iterations
        #[arg(long)]
        max_iters: Option<usize>,
        /// Cost-gap limit, as a number or gap=value
        #[arg(long)]
        thresholds: Option<Thresholds>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file
    scenario: PathBuf,
    /// Number of trajectory samples
    #[arg(long)]
    samples: Option<usize>,
    /// Congruence tolerance, relative to formation size
    #[arg(long)]
    tol: Option<f64>,
    /// Extra full turns
    #[arg(long, allow_hyphen_values = true)]
    winding: Option<i64>,
}

impl Common {
    fn load(&self) -> Result<Scenario, Failure> {
        Scenario::load(&self.scenario)?.apply(Overrides {
            samples: self.samples,
            tol: self.tol,
            winding: self.winding,
        })
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Plan { common, out } => commands::plan(&common.load()?, &out),
        Command::Verify { common, thresholds } => {
            commands::verify(&common.load()?, &thresholds.unwrap_or_default())
        }
        Command::Oracle {
            common,
            knots,
            max_iters,
            thresholds,
        } => commands::oracle(
            &common.load()?,
            knots,
            max_iters,
            &thresholds.unwrap_or_default(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                failure::INVALID_INPUT
            } else {
                0
            });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}

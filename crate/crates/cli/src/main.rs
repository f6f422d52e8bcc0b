//! `sid`: constrained subspace identification workbench.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sid_core::SidError;

#[derive(Debug, Parser)]
#[command(name = "sid", version, about = "Subspace identification with eigenvalue constraints from step-response priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
struct StageArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory. Stage commands print to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the identification experiment.
    Simulate(StageArgs),
    /// Simulate the noisy step test.
    Step(StageArgs),
    /// Extract step-response features and the priors they imply.
    Features(StageArgs),
    /// Build the constraint region of each case.
    Region {
        #[command(flatten)]
        args: StageArgs,
        /// Only this case.
        #[arg(long)]
        case: Option<String>,
    },
    /// Identify an unconstrained model with PI-MOESP.
    Identify(StageArgs),
    /// Re-estimate A under each region constraint.
    Constrain {
        #[command(flatten)]
        args: StageArgs,
        #[arg(long)]
        case: Option<String>,
        /// Model file to constrain instead of identifying from the config.
        #[arg(long, requires = "region")]
        model: Option<PathBuf>,
        /// Region file used with `--model`.
        #[arg(long, requires = "model")]
        region: Option<PathBuf>,
    },
    /// Run the full procedure once and write every artifact.
    Pipeline(StageArgs),
    /// Repeat identification over independent noise realizations.
    Montecarlo {
        #[command(flatten)]
        args: StageArgs,
        #[arg(long)]
        runs: Option<usize>,
        /// Worker threads, 0 for one per core.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Boundary data for the region constructors.
    Gallery {
        /// Damping-ratio bounds.
        #[arg(long, value_delimiter = ',')]
        zeta: Vec<f64>,
        /// Sampling period for the conic and settling shapes.
        #[arg(long, default_value_t = 0.0)]
        ts: f64,
        /// Damped-frequency bounds, rad/s.
        #[arg(long, value_delimiter = ',')]
        wd: Vec<f64>,
        /// Settling bounds `ζw_n`, rad/s.
        #[arg(long = "zeta-wn", value_delimiter = ',')]
        zeta_wn: Vec<f64>,
        #[arg(long, default_value = "out/gallery")]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

/// Exit status for a failed command: 2 config, 4 infeasible, 3 any other stage.
fn exit_code(e: &SidError) -> u8 {
    match e.root() {
        SidError::Config(_) => 2,
        SidError::Infeasible(_) => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use decouple_core::verify::DEFAULT_TOLERANCE;
use decouple_core::{FeedbackKind, OfMode};

mod commands;
mod dot;
mod error;

use error::CliError;

/// Minimal input/output placement and feedback synthesis for disturbance
/// decoupling on directed networks.
///
/// Exit codes: 0 success, 1 I/O failure or failed check, 2 parse or validation error,
/// 3 infeasible placement, 4 size limit exceeded.
#[derive(Parser)]
#[command(name = "decouple", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Z*, S*, their boundaries, the path count and feasibility
    /// verdicts for any input/output sets in the file
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Place a minimum number of inputs (and outputs) and write them back
    Solve {
        feedback: Feedback,
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Assign random weights and build the feedback law
    Synthesize {
        feedback: Feedback,
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check a synthesized law by power-series residuals and simulation
    Verify {
        file: PathBuf,
        /// Feedback type when FILE is a plain weighted instance rather than
        /// a synthesis report
        #[arg(long, value_enum)]
        feedback: Option<Feedback>,
        #[command(flatten)]
        common: Common,
    },
    /// Render the network in DOT with role colours
    ExportDot {
        file: PathBuf,
        /// Colour outputs and observer nodes for this feedback type, solving
        /// for a placement first when the file has none
        #[arg(long, value_enum)]
        feedback: Option<Feedback>,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check the solvers against exhaustive search
    Oracle {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Seed for weights and disturbance signals
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Absolute residual tolerance
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Power-series horizon (default: closed-loop dimension)
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Output-feedback search mode
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Maximum number of enumerated disturbance-to-target paths
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
    /// Output file (instance, report or DOT depending on the command)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Feedback {
    Sf,
    Of,
    Df,
}

impl From<Feedback> for FeedbackKind {
    fn from(f: Feedback) -> Self {
        match f {
            Feedback::Sf => FeedbackKind::Sf,
            Feedback::Of => FeedbackKind::Of,
            Feedback::Df => FeedbackKind::Df,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Heuristic,
}

impl From<Mode> for OfMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => OfMode::Exact,
            Mode::Heuristic => OfMode::Heuristic,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { file, common } => commands::analyze(&file, &common),
        Command::Solve { feedback, file, common } => commands::solve(feedback.into(), &file, &common),
        Command::Synthesize { feedback, file, common } => commands::synthesize(feedback.into(), &file, &common),
        Command::Verify { file, feedback, common } => commands::verify(&file, feedback.map(Into::into), &common),
        Command::ExportDot { file, feedback, common } => commands::export_dot(&file, feedback.map(Into::into), &common),
        Command::Oracle { file, common } => commands::oracle(&file, &common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `robust-nv`: solve, sweep and evaluate budget-constrained robust
//! newsvendor instances from JSON files.
//!
//! Exit codes: 0 success, 1 usage or runtime failure, 2 file/JSON parse
//! error, 3 schema or option error, 4 infeasible moment data.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod commands;
mod instance;
mod output;

/// Errors grouped by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: unreadable file or malformed JSON.
    Parse(String),
    /// Exit 3: structurally invalid instance or missing option.
    Schema(String),
    /// Exit 4: moment data violating a feasibility bound.
    InfeasibleMoments(Vec<String>),
    /// Exit 1: solver or I/O failure at runtime.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Schema(_) => 3,
            CliError::InfeasibleMoments(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "parse error: {msg}"),
            CliError::Schema(msg) => write!(f, "schema error: {msg}"),
            CliError::InfeasibleMoments(violations) => {
                write!(f, "infeasible moments:\n  {}", violations.join("\n  "))
            }
            CliError::Runtime(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl From<robust_newsvendor::Error> for CliError {
    fn from(e: robust_newsvendor::Error) -> Self {
        use robust_newsvendor::Error;
        match e {
            Error::InfeasibleMoments(report) => CliError::InfeasibleMoments(report.violations),
            Error::BetaRequired { item } => {
                CliError::Schema(format!("beta required for lower bound (item {item})"))
            }
            Error::UnknownFamily(_)
            | Error::InvalidParameters(_)
            | Error::DimensionMismatch(_)
            | Error::InvalidDistribution(_)
            | Error::TooManyScenarios { .. }
            | Error::EvaiUndefined => CliError::Schema(e.to_string()),
            Error::InfeasibleConstraints | Error::Numerical(_) => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "robust-nv",
    version,
    about = "Distributionally robust multi-item newsvendor solver",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and report validation notes.
    Validate {
        /// Re-emit the normalized instance JSON instead of the report.
        #[arg(long)]
        echo: bool,
        instance: PathBuf,
    },
    /// Compute the robust ordering policy for one budget.
    Solve {
        /// Budget, overriding the instance file's `budget`.
        #[arg(long)]
        budget: Option<f64>,
        /// Solve the skewness-informed lower-bound model instead.
        #[arg(long)]
        lower: bool,
        instance: PathBuf,
    },
    /// Evaluate every policy across a budget grid and emit CSV.
    Sweep {
        /// Number of evenly spaced budgets from 0 to the unconstrained
        /// optimum spend.
        #[arg(long)]
        grid: Option<usize>,
        /// Seed recorded in the experiment configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Run a bundled 25-item preset case (1-9) instead of a file.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
        case: Option<u8>,
        /// Mark-up regime for --case: low, average or high.
        #[arg(long)]
        margin: Option<String>,
        /// Write the CSV here (atomically); stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        instance: Option<PathBuf>,
    },
    /// Score every policy against the ground truths at one budget.
    Evaluate {
        #[arg(long)]
        budget: Option<f64>,
        instance: PathBuf,
    },
    /// Robust policy under multiple linear constraints, with shadow prices.
    ExtMulti { instance: PathBuf },
    /// Robust policy under multiplicative supply yield.
    ExtYield {
        #[arg(long)]
        budget: Option<f64>,
        instance: PathBuf,
    },
    /// Risk-averse robust policy minimizing worst-case CVaR.
    ExtCvar {
        /// Risk level in [0, 1).
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        budget: Option<f64>,
        instance: PathBuf,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { echo, instance } => commands::validate(&instance, echo),
        Command::Solve {
            budget,
            lower,
            instance,
        } => commands::solve(&instance, budget, lower),
        Command::Sweep {
            grid,
            seed,
            case,
            margin,
            out,
            instance,
        } => commands::sweep(commands::SweepArgs {
            grid,
            seed,
            case,
            margin,
            out,
            instance,
        }),
        Command::Evaluate { budget, instance } => commands::evaluate(&instance, budget),
        Command::ExtMulti { instance } => commands::ext_multi(&instance),
        Command::ExtYield { budget, instance } => commands::ext_yield(&instance, budget),
        Command::ExtCvar {
            gamma,
            budget,
            instance,
        } => commands::ext_cvar(&instance, gamma, budget),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}

//! `mrhinf`: design, analyze and simulate H-infinity optimal interpolators
//! for nonuniformly decimated signals.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mrhinf::design::GammaStep;

use config::{SolverArgs, SpecArgs, DEFAULT_GRID};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("synthesis failed: {error}")]
    Synthesis { error: mrhinf::Error, trace: Vec<GammaStep> },
    #[error("{0}")]
    Io(String),
}

impl From<mrhinf::Error> for CliError {
    fn from(e: mrhinf::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Synthesis { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "mrhinf", version, about = "H-infinity optimal interpolation for nonuniformly decimated signals")]
struct Cli {
    /// Print the gamma iteration trace
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the optimal filter and its filterbank
    Design {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Frequency points for the branch response
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Rank all cyclic classes of patterns with M samples per segment
    Search {
        /// Segment length
        #[arg(value_name = "M")]
        segment: usize,
        /// Retained samples per segment; every count 1..M-1 when omitted
        #[arg(value_name = "N")]
        retained: Option<usize>,
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Parallel synthesis workers (MRHINF_WORKERS takes precedence)
        #[arg(long)]
        workers: Option<usize>,
        /// Directory for search.csv and search.json
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// H-infinity norm of a stored system, or the error norm J of a stored filter
    Norm {
        /// Model JSON or design.json
        system: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = mrhinf::ltisys::DEFAULT_NORM_TOL)]
        tol: f64,
    },
    /// Decimate a signal, reconstruct it and report the error
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Use a stored filter (design.json or model JSON) instead of designing one
        #[arg(long, value_name = "PATH")]
        filter: Option<PathBuf>,
        /// Single-column CSV input signal
        #[arg(long, value_name = "PATH", conflicts_with = "rect")]
        signal: Option<PathBuf>,
        /// Rectangular wave with this period in samples [default: 20]
        #[arg(long, value_name = "PERIOD")]
        rect: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 600)]
        length: usize,
        /// Also run a truncated ideal-lowpass interpolator with this many taps
        #[arg(long, value_name = "TAPS")]
        baseline: Option<usize>,
        /// Directory for simulation.csv (stdout otherwise)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Magnitude response of a filter or filterbank branch as CSV
    Response {
        /// Model JSON, design.json or filterbank.json
        filter: PathBuf,
        /// Filterbank branch, counted from 0
        #[arg(long, default_value_t = 0)]
        branch: usize,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Design { spec, solver, grid, out } => commands::design(&spec, &solver, grid, &out, cli.verbose),
        Command::Search { segment, retained, spec, solver, workers, out } => {
            commands::search(segment, retained, &spec, &solver, workers, out.as_deref())
        }
        Command::Norm { system, spec, tol } => commands::norm(&system, &spec, tol),
        Command::Simulate { spec, solver, filter, signal, rect, amplitude, length, baseline, out } => {
            let signal = commands::SignalArgs { signal, rect, amplitude, length };
            commands::simulate(&spec, &solver, filter.as_deref(), &signal, baseline, out.as_deref())
        }
        Command::Response { filter, branch, grid, out } => commands::response(&filter, branch, grid, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Synthesis { trace, .. } = &e {
                for step in trace {
                    eprintln!("  gamma {:.6e} {}", step.gamma, if step.feasible { "feasible" } else { "infeasible" });
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}

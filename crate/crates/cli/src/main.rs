//! `nasq`: classify bipartite states against the absolutely separable set
//! and quantify how far they are from it.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 malformed input,
//! 3 unsupported dimensions, 4 unsupported measure/mode combination,
//! 5 unwritable output path, 6 oracle failure or unknown suite.

mod commands;

use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "nasq",
    version,
    about = "Absolute separability and NAS measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureArg {
    Relent,
    Bures,
    Trace,
    Hs,
    Witness,
}

impl MeasureArg {
    pub fn name(self) -> &'static str {
        match self {
            Self::Relent => "relent",
            Self::Bures => "bures",
            Self::Trace => "trace",
            Self::Hs => "hs",
            Self::Witness => "witness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Closed,
    Aligned,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// AS / PPT verdict for a state file.
    Classify {
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = nasq_core::as_geometry::DEFAULT_AS_TOL)]
        tol: f64,
    },
    /// Value of one NAS measure.
    Measure {
        #[arg(long)]
        input: String,
        #[arg(long, value_enum)]
        measure: MeasureArg,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        /// Criterion tolerance for the AS short-circuit.
        #[arg(long, default_value_t = nasq_core::as_geometry::DEFAULT_AS_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Werner-family curves of all three measures as CSV.
    SweepWerner {
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        /// `start:stop:steps`, endpoints included.
        #[arg(long, default_value = "0:1:101")]
        grid: String,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        #[arg(long)]
        out: String,
    },
    /// Seeded randomised verification suite.
    Oracle {
        /// monotonicity, convexity, conjecture, witness-identity or segment.
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Where failing cases are written; defaults to
        /// `nasq-oracle-<suite>-<seed>.json` in the working directory.
        #[arg(long)]
        out: Option<String>,
    },
    /// Write a Werner state file.
    WernerState {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<String>,
    },
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn configure_threads() {
    let Ok(raw) = std::env::var("NASQ_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        _ => eprintln!("nasq: ignoring NASQ_THREADS={raw:?}, expected a positive integer"),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { input, tol } => commands::classify(&input, tol),
        Command::Measure {
            input,
            measure,
            mode,
            tol,
            seed,
        } => commands::measure(&input, measure, mode, tol, seed),
        Command::SweepWerner {
            gamma,
            phi,
            grid,
            mode,
            out,
        } => commands::sweep_werner(gamma, phi, &grid, mode, &out),
        Command::Oracle {
            suite,
            seed,
            trials,
            out,
        } => {
            let r = commands::oracle(&suite, seed, trials, out.as_deref());
            if let Err(e) = &r {
                if e.code == 6 && e.message.starts_with("unknown suite") {
                    eprintln!("{}", Cli::command().render_usage());
                }
            }
            r
        }
        Command::WernerState { p, gamma, phi, out } => {
            commands::werner_state(p, gamma, phi, out.as_deref())
        }
    };
    match result {
        Ok(json) => {
            println!("{json}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nasq: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

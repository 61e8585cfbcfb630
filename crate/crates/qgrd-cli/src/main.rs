//! `qgrd`: batch experiments on discrete quantum groups.
//!
//! Every run writes CSV or JSON headed by the exact configuration used and
//! exits 0 on success. Failures print `{"error": code, "message": text}`
//! on stderr and exit with 2 (invalid config), 3 (capability missing), 4
//! (no convergence where the experiment demands it) or 1 (I/O).

mod config;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Experiment, Flags, RunConfig};

#[derive(Parser)]
#[command(name = "qgrd", version, about = "Rapid decay, growth and quantum metrics of discrete quantum groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shell counts and dimension sums up to --N
    Growth(Flags),
    /// Sampled rapid-decay ratios per shell and the fitted (c, s)
    RdFit(Flags),
    /// Polynomial against exponential fits of classical and quantum growth
    ModularContrast(Flags),
    /// Spectrum of the Dirac operator on the truncation l <= --M
    Dirac(Flags),
    /// Partial sums of Tr(D^-p) and a convergence verdict
    Summability(Flags),
    /// Twisted Lipschitz seminorm of an element
    Lipnorm(Flags),
    /// Lipschitz distance between two states
    Distance(Flags),
    /// Low-part and tail estimates on random Lipschitz-normalized elements
    Probe(Flags),
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        match self {
            Command::Growth(f) => (Experiment::Growth, f),
            Command::RdFit(f) => (Experiment::RdFit, f),
            Command::ModularContrast(f) => (Experiment::ModularContrast, f),
            Command::Dirac(f) => (Experiment::Dirac, f),
            Command::Summability(f) => (Experiment::Summability, f),
            Command::Lipnorm(f) => (Experiment::Lipnorm, f),
            Command::Distance(f) => (Experiment::Distance, f),
            Command::Probe(f) => (Experiment::Probe, f),
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: "invalid_config",
            message: message.into(),
            exit: 2,
        }
    }

    pub fn not_converged(message: impl Into<String>) -> Self {
        CliError {
            code: "non_convergence",
            message: message.into(),
            exit: 4,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: "io",
            message: message.into(),
            exit: 1,
        }
    }
}

impl From<qgrd::Error> for CliError {
    fn from(e: qgrd::Error) -> Self {
        match e {
            qgrd::Error::CapabilityAbsent { .. } => CliError {
                code: "capability_missing",
                message: e.to_string(),
                exit: 3,
            },
            qgrd::Error::MissingRdConstants(_) => CliError {
                code: "missing_rd_constants",
                message: e.to_string(),
                exit: 2,
            },
            other => CliError::invalid(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::invalid(e.to_string().trim_end().to_string())),
    };
    let (experiment, flags) = cli.command.split();
    let result = RunConfig::from_flags(experiment, &flags).and_then(|cfg| {
        match cfg.threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::io(e.to_string()))?
                .install(|| run::run(&cfg)),
            None => run::run(&cfg),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", json!({ "error": e.code, "message": e.message }));
    ExitCode::from(e.exit)
}

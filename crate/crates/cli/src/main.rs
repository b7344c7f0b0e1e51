//! `linkloop` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 file error,
//! 3 argument error, 4 state validation error.

mod path;
mod report;
mod state_file;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use linkloop::qstate::{self, PureState};
use linkloop::verify::ObservableMode;
use linkloop::Error;
use serde_json::Value;

use crate::state_file::{State, StateFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("file error: {0}")]
    File(String),
    #[error("argument error: {0}")]
    Args(String),
    #[error("invalid path {path:?} {source}")]
    Path { path: String, source: path::ParseError },
    #[error("state validation failed: {0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::File(_) => 2,
            CliError::Args(_) | CliError::Path { .. } => 3,
            CliError::Validation(_) => 4,
        }
    }

    pub fn from_core(e: Error) -> Self {
        match e {
            Error::Norm(_) | Error::Hermiticity(_) | Error::Trace(_) | Error::NotPositive(_) | Error::Reality(_) => {
                CliError::Validation(e.to_string())
            }
            Error::Dimension { .. } => CliError::File(e.to_string()),
            _ => CliError::Args(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "linkloop", version, about = "Loop-trace local invariants of multi-qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate loop invariants of a state file.
    Compute {
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated sites, `~` marks a flipped site. Repeatable.
        #[arg(long = "path")]
        paths: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a certification suite.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// States per suite (must be at least 1).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Override the suite tolerance (standard errors for `fidelity`, rank threshold for `independence`).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_enum, default_value_t = Observable::Hermitian)]
        observable: Observable,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a reference or random state file.
    Sample {
        kind: SampleKind,
        #[arg(long, default_value_t = 3)]
        n_sites: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank of a random mixed state.
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Basis index of a `basis` state.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Su2,
    Sl2c,
    Identities,
    Independence,
    Fidelity,
}

#[derive(Clone, Copy, ValueEnum)]
enum Observable {
    Hermitian,
    Su2,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    Haar,
    Mixed,
    Ghz,
    W,
    Basis,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::File(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::File(format!("stdout: {e}")))
        }
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn compute(state: &Path, paths: &[String], out: Option<&PathBuf>) -> Result<(), CliError> {
    let loaded = state_file::load(state)?;
    let loops = paths
        .iter()
        .map(|p| match path::parse_path(p, loaded.n_sites()) {
            Ok(lp) => Ok((p.clone(), lp)),
            Err(source) => Err(CliError::Path {
                path: p.clone(),
                source,
            }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = report::compute(&state.display().to_string(), &loaded, &loops)?;
    emit(&render(&report), out)
}

fn sample(kind: SampleKind, n: usize, seed: u64, rank: usize, index: usize) -> Result<State, CliError> {
    let state = match kind {
        SampleKind::Haar => State::Pure(qstate::haar_random_pure(n, seed).map_err(CliError::from_core)?),
        SampleKind::Ghz => State::Pure(PureState::ghz(n).map_err(CliError::from_core)?),
        SampleKind::W => State::Pure(PureState::w(n).map_err(CliError::from_core)?),
        SampleKind::Basis => State::Pure(PureState::basis(n, index).map_err(CliError::from_core)?),
        SampleKind::Mixed => State::Mixed(qstate::random_density(n, rank, seed).map_err(CliError::from_core)?),
    };
    Ok(state)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Compute { state, paths, out } => {
            compute(&state, &paths, out.as_ref())?;
            Ok(true)
        }
        Command::Verify {
            suite,
            seed,
            trials,
            tol,
            samples,
            k,
            observable,
            out,
        } => {
            if trials == 0 {
                return Err(CliError::Args("--trials must be at least 1".into()));
            }
            if tol.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                return Err(CliError::Args("--tol must be positive".into()));
            }
            let opts = report::VerifyOptions {
                seed,
                trials,
                tol,
                samples,
                k,
                mode: match observable {
                    Observable::Hermitian => ObservableMode::Hermitian,
                    Observable::Su2 => ObservableMode::Su2Valued,
                },
            };
            let (value, passed) = match suite {
                Suite::Su2 => report::verify_su2(&opts)?,
                Suite::Sl2c => report::verify_sl2c(&opts)?,
                Suite::Identities => report::verify_identities(&opts)?,
                Suite::Independence => report::verify_independence(&opts)?,
                Suite::Fidelity => report::verify_fidelity(&opts)?,
            };
            emit(&render(&value), out.as_ref())?;
            Ok(passed)
        }
        Command::Sample {
            kind,
            n_sites,
            seed,
            rank,
            index,
            out,
        } => {
            let state = sample(kind, n_sites, seed, rank, index)?;
            let text = serde_json::to_string_pretty(&StateFile::from_state(&state)).expect("state files serialize");
            emit(&(text + "\n"), out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("linkloop: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `hopfphase`: geometric phases, Chern numbers and entanglement checks from
//! the command line.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Params;

#[derive(Parser)]
#[command(name = "hopfphase", version, about = "Geometric phase factors via Hopf fibrations")]
struct Cli {
    /// TOML file with `command` and any flag as a kebab-case key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a trajectory and write samples.
    Evolve(Params),
    /// Phase decomposition and overlap identities.
    Phase(Params),
    /// Chern numbers on CP^1, CP^2 and S^4.
    Chern(Params),
    /// det c and CHSH values for four-level states.
    Entangle(Params),
    /// Every check with default settings.
    VerifyAll(Params),
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numeric(hopfphase::Error),
}

impl From<hopfphase::Error> for CliError {
    fn from(e: hopfphase::Error) -> Self {
        match e {
            hopfphase::Error::InvalidParameter(m) => CliError::Config(m),
            hopfphase::Error::DimensionTooLarge { .. } | hopfphase::Error::OddDimension(..) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(hopfphase::Error::ChartSingular { .. }) => 3,
            CliError::Numeric(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numeric(e) => write!(f, "numerical error: {e}"),
        }
    }
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("HOPFPHASE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("HOPFPHASE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    threads()?;
    let file = match &cli.config {
        Some(path) => Some(config::load(path)?),
        None => None,
    };
    let (name, flags) = match cli.command {
        Some(Command::Evolve(p)) => ("evolve".to_string(), p),
        Some(Command::Phase(p)) => ("phase".to_string(), p),
        Some(Command::Chern(p)) => ("chern".to_string(), p),
        Some(Command::Entangle(p)) => ("entangle".to_string(), p),
        Some(Command::VerifyAll(p)) => ("verify-all".to_string(), p),
        None => match file.as_ref().and_then(|f| f.command.clone()) {
            Some(c) => (c, Params::default()),
            None => return Err(CliError::Config("no subcommand given".into())),
        },
    };
    let params = match file {
        Some(f) => flags.over(f.params),
        None => flags,
    };
    let report = match name.as_str() {
        "evolve" => commands::evolve(&params)?,
        "phase" => commands::phase(&params)?,
        "chern" => commands::chern(&params)?,
        "entangle" => commands::entangle(&params)?,
        "verify-all" => commands::verify_all(&params)?,
        other => return Err(CliError::Config(format!("unknown command {other:?}"))),
    };
    report.emit(params.out.as_deref(), params.format.as_deref())?;
    Ok(report.pass())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

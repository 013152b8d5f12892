use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use qszasz::cli::{error_exit_code, exit_code, run};
use qszasz::config::{Command, ExperimentConfig};
use qszasz::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Moments,
    Bounds,
    Statconv,
    Sweep,
    VerifyAll,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Moments => Command::Moments,
            Cmd::Bounds => Command::Bounds,
            Cmd::Statconv => Command::Statconv,
            Cmd::Sweep => Command::Sweep,
            Cmd::VerifyAll => Command::VerifyAll,
        }
    }
}

/// Verification experiments for Stancu-type q-Favard-Szász operators.
#[derive(Debug, Parser)]
#[command(name = "qszasz", version)]
struct Args {
    command: Cmd,
    /// Experiment config (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Directory for `<table>.csv` files; tables go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides both `report_tol` and `moment_tol`.
    #[arg(long)]
    tol: Option<f64>,
}

fn init_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("QSZASZ_THREADS") else {
        return Ok(());
    };
    let n: usize =
        raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::InvalidParameter(format!("QSZASZ_THREADS must be a positive integer, got `{raw}`"))
        })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn main_inner(args: Args) -> Result<i32, Error> {
    init_threads()?;
    let text = fs::read_to_string(&args.config).map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(tol) = args.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("--tol must be a positive real, got {tol}")));
        }
        cfg.report_tol = tol;
        cfg.moment_tol = tol;
    }
    let command: Command = args.command.into();
    if let Some(c) = cfg.command {
        if c != command {
            eprintln!("note: config says `{}`, running `{}`", c.name(), command.name());
        }
    }
    let outcome = run(command, &cfg)?;
    match args.out.or(cfg.out.as_ref().map(PathBuf::from)) {
        Some(dir) => outcome.write_dir(&dir)?,
        None => print!("{}", outcome.to_text()),
    }
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    Ok(exit_code(&outcome))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("qszasz: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}

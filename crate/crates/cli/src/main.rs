//! `mzient`: run, optimize and sweep the interferometer protocols, and write
//! figure data as CSV.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod commands;
mod config;
mod figures;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Overrides;

#[derive(Debug, Parser)]
#[command(name = "mzient", version, about = "Heralded entanglement of two detuned emitters in a waveguide interferometer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One protocol run: outcome table and average concurrence.
    Run(Overrides),
    /// Photon energy that maximizes the average concurrence.
    Optimize(Overrides),
    /// Optimal average concurrence over a (δ/Γ1, Γ2/Γ1) grid.
    Sweep(Overrides),
    /// Data behind one figure: 2b 2c 2d 3a 3b 3c 3d 4a 4b 4c 4d S1 S2.
    Figure(figures::FigureArgs),
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<mzient::Error> for CliError {
    fn from(e: mzient::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MZIENT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("MZIENT_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot start {threads} threads: {e}")))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Run(o) => commands::run(&o.resolve()?),
        Command::Optimize(o) => commands::optimize(&o.resolve()?),
        Command::Sweep(o) => commands::sweep(&o.resolve()?),
        Command::Figure(args) => figures::generate(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mzient: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

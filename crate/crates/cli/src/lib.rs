//! Command-line front end: argument parsing, table output and the
//! verification suite.

pub mod args;
pub mod commands;
pub mod table;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command, OutputArgs};
use table::{OutputTable, TableError};

/// Exit status for a failed verification run.
pub const EXIT_VERIFY_FAILED: i32 = 1;
/// Exit status for bad arguments, invalid physics inputs and I/O problems.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cvtele_core::Error),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

fn emit(table: &OutputTable, output: &OutputArgs) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            let wrap = |source| CliError::Output {
                path: path.clone(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(wrap)?);
            table.write(output.format, &mut w)?;
            w.flush().map_err(wrap)
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.write(output.format, &mut w)?;
            w.flush().map_err(TableError::from)?;
            Ok(())
        }
    }
}

/// Runs a parsed command and returns the process exit status.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    let (table, output) = match &cli.command {
        Command::BetaDensity(a) => (commands::beta_density_table(a)?, &a.output),
        Command::PhotonStats(a) => (commands::photon_stats_table(a)?, &a.output),
        Command::LossGain(a) => (commands::loss_gain_table(a)?, &a.output),
        Command::Conditional(a) => (commands::conditional_table(a)?, &a.output),
        Command::Polarization(a) => (commands::polarization_table(a)?, &a.output),
        Command::Sample(a) => (commands::sample_table(a)?, &a.output),
        Command::Verify(a) => {
            let report = verify::run(a.level);
            println!("{report}");
            return Ok(if report.passed() {
                0
            } else {
                EXIT_VERIFY_FAILED
            });
        }
    };
    emit(&table, output)?;
    Ok(0)
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version also arrive here
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

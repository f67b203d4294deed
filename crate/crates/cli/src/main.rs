// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracres_cli::commands;
use fracres_cli::scenario::KEY_HELP;
use fracres_cli::{CliError, ScenarioConfig};

/// Driven Bose-Hubbard chains: resonances, closed and open dynamics.
#[derive(Parser)]
#[command(name = "fracres", version, after_help = KEY_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its time series as CSV.
    #[command(after_help = KEY_HELP)]
    Simulate {
        file: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario closed and open on the same grid.
    #[command(after_help = KEY_HELP)]
    Compare {
        file: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List drive frequencies resonant for the scenario's initial state.
    Resonances {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Hilbert-space sizes for L sites with cutoff n_max.
    Dims {
        #[arg(value_name = "L")]
        sites: usize,
        n_max: u8,
    },
    /// Line plot of CSV columns against the first column.
    Plot {
        csv: PathBuf,
        /// Comma-separated column names.
        #[arg(long, value_delimiter = ',', required = true)]
        cols: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(report: commands::Report, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, &report.csv)?,
        None => print!("{}", report.csv),
    }
    eprint!("{}", report.summary);
    Ok(())
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate { file, out } => {
            let config = ScenarioConfig::from_path(&file)?;
            emit(commands::simulate(&config)?, out.as_deref())
        }
        Command::Compare { file, out } => {
            let config = ScenarioConfig::from_path(&file)?;
            let threads = commands::thread_limit()?;
            emit(commands::compare(&config, threads)?, out.as_deref())
        }
        Command::Resonances { file, json } => {
            let config = ScenarioConfig::from_path(&file)?;
            print!("{}", commands::resonances(&config, json)?);
            Ok(())
        }
        Command::Dims { sites, n_max } => {
            print!("{}", commands::dims(sites, n_max)?);
            Ok(())
        }
        Command::Plot { csv, cols, out } => {
            let text = std::fs::read_to_string(&csv).map_err(|source| CliError::Io {
                path: csv.display().to_string(),
                source,
            })?;
            let svg = commands::plot_csv(&text, &cols)?;
            write_file(&out, &svg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

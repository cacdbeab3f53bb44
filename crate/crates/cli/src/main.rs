//! `dhosc`: run driven-oscillator experiments, compare outputs, and export tables.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dhosc_core::compare::{compare, ToleranceSpec};
use dhosc_core::experiment::{decompose_report, preset, pulse_table, run_experiment, ExperimentConfig, PRESETS};
use dhosc_core::table::Table;
use dhosc_core::{Error, ErrorClass};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_COMPARISON: u8 = 4;

#[derive(Parser)]
#[command(name = "dhosc", version, about = "Driven harmonic oscillator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in experiment: fig1 (nonresonant) or fig2 (resonant).
    #[arg(long, value_parser = PRESETS)]
    preset: Option<String>,
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        match (&self.preset, &self.config) {
            (Some(name), _) => preset(name),
            (None, Some(path)) => ExperimentConfig::from_path(path),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Propagate numerically, evaluate the exact solution, and write all outputs.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (overrides out.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two CSV files (or run directories) column by column.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Default max-abs tolerance per column.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Per-column override, `name=tol`; repeatable.
        #[arg(long = "col", value_name = "NAME=TOL")]
        columns: Vec<String>,
        /// Tolerance on the L² distance for wave-function CSVs (defaults to --tol).
        #[arg(long)]
        l2_tol: Option<f64>,
        /// Also write the machine-readable JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tabulate the coefficients of H, H̃ and H_c at the given times.
    Decompose {
        #[command(flatten)]
        source: Source,
        /// Comma-separated times.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        times: Vec<f64>,
        /// Interpret --times in oscillator cycles rather than time units.
        #[arg(long)]
        cycles: bool,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export F(t), fs, fc, d and ḋ on an even mesh through the run end.
    PulseTable {
        #[command(flatten)]
        source: Source,
        /// Number of intervals in the mesh.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Core(Error),
    Comparison,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn emit(table: &Table, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => table.write_path(path),
        None => {
            let stdout = std::io::stdout();
            table.write_to(stdout.lock())
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { source, out } => {
            let mut config = source.load()?;
            if let Some(dir) = out {
                config.out_dir = dir;
            }
            let outcome = run_experiment(&config)?;
            println!("wrote {} files to {}", outcome.files.len(), outcome.dir.display());
            println!("records: {}", outcome.numeric.records.len());
            println!("final L2 distance numeric vs exact: {:.3e}", outcome.final_distance);
            println!("max |<x> - d|: {:.3e}", outcome.max_trajectory_error);
            Ok(())
        }
        Command::Compare { a, b, tol, columns, l2_tol, json } => {
            let mut spec = ToleranceSpec::uniform(tol);
            for c in &columns {
                spec = spec.with_override(c)?;
            }
            spec.l2 = l2_tol;
            let report = compare(&a, &b, &spec)?;
            print!("{}", report.summary());
            if let Some(path) = json {
                std::fs::write(&path, report.to_json()).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            }
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Comparison)
            }
        }
        Command::Decompose { source, times, cycles, out } => {
            let config = source.load()?;
            let scale = if cycles { config.params.period() } else { 1.0 };
            let times: Vec<f64> = times.iter().map(|t| t * scale).collect();
            emit(&decompose_report(&config, &times)?, out.as_deref())?;
            Ok(())
        }
        Command::PulseTable { source, samples, out } => {
            let config = source.load()?;
            emit(&pulse_table(&config, samples)?, out.as_deref())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Comparison) => ExitCode::from(EXIT_COMPARISON),
        Err(Failure::Core(e)) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Input => EXIT_CONFIG,
                ErrorClass::Numerical => EXIT_NUMERICAL,
            })
        }
    }
}

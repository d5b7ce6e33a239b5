use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use modvar_cli::check::run_suite;
use modvar_cli::run::{default_ell, error_record, script_dir, DEFAULT_M, DEFAULT_P, DEFAULT_TOLERANCE};
use modvar_cli::{parse, run, CliError, RunOptions};
use modvar_core::readout::{Observable, ObservableSpec, BUILTIN_OBSERVABLES};
use modvar_core::Grid;

/// Modular-variable qubit simulator.
#[derive(Debug, Parser)]
#[command(name = "modvar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Runs a circuit script and prints one JSON record per measurement.
    Run {
        script: PathBuf,
        /// Directory for dump files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Tolerance for `expect=` checks without `tol=`.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Runs the built-in invariant suite.
    Check {
        /// Number of random states per check.
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Prints a built-in observable as JSON.
    DumpObservable {
        name: String,
        /// Grid period.
        #[arg(long)]
        ell: Option<f64>,
    },
}

fn report(err: &CliError) -> ExitCode {
    println!("{}", error_record(err).to_json());
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn run_script(script: PathBuf, out_dir: PathBuf, tolerance: f64) -> ExitCode {
    let source = match std::fs::read_to_string(&script) {
        Ok(s) => s,
        Err(e) => return report(&CliError::Io(format!("cannot read {}: {e}", script.display()))),
    };
    let program = match parse(&source) {
        Ok(p) => p,
        Err(e) => return report(&e),
    };
    let opts = RunOptions { out_dir, base_dir: script_dir(&script), tolerance };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(&program, &opts, &mut lock) {
        Ok(summary) => {
            let _ = lock.flush();
            if summary.failed_checks > 0 {
                eprintln!("{} of {} checks failed", summary.failed_checks, summary.checks);
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            drop(lock);
            report(&e)
        }
    }
}

fn check(states: usize, seed: u64) -> ExitCode {
    let grid = match Grid::new(default_ell(), DEFAULT_M, DEFAULT_P) {
        Ok(g) => g,
        Err(e) => return report(&CliError::Runtime { line: 0, source: e }),
    };
    let outcomes = run_suite(&grid, states, seed);
    for o in &outcomes {
        println!("{}", o.record().to_json());
    }
    if outcomes.iter().all(|o| o.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn dump_observable(name: &str, ell: Option<f64>) -> ExitCode {
    let ell = ell.unwrap_or_else(default_ell);
    match Observable::builtin(name, ell) {
        Some(Observable::Fourier(table)) => {
            let spec = ObservableSpec::from(&table);
            println!("{}", serde_json::to_string(&spec).expect("observable specs serialize"));
            ExitCode::SUCCESS
        }
        Some(Observable::Step(axis)) => {
            println!("{}", serde_json::json!({ "name": name, "step": format!("{axis:?}").to_lowercase() }));
            ExitCode::SUCCESS
        }
        None => {
            let known = BUILTIN_OBSERVABLES.join(", ");
            report(&CliError::Usage(format!("unknown observable `{name}`; known: {known}")))
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { script, out_dir, tolerance } => run_script(script, out_dir, tolerance),
        Command::Check { states, seed } => check(states, seed),
        Command::DumpObservable { name, ell } => dump_observable(&name, ell),
    }
}

//! `itesim` command-line front end.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::config::{ConfigFlags, ExperimentConfig};
use crate::error::Error;
use crate::experiments::{ice_model, Experiment};
use crate::output::emit_outputs;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "itesim",
    version,
    about = "Monte Carlo simulator for information-theoretic erasure of memory bits"
)]
struct Cli {
    #[command(flatten)]
    flags: ConfigFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Johnson-noise capacitor bit
    Capacitor {
        #[command(subcommand)]
        op: CapacitorOp,
    },
    /// Symmetric double-well bit
    Doublewell {
        #[command(subcommand)]
        op: DoublewellOp,
    },
    /// Dissipation bounds and the ice-cube memory
    Bounds {
        #[command(subcommand)]
        op: BoundsOp,
    },
    /// Information measures
    Info {
        #[command(subcommand)]
        op: InfoOp,
    },
    /// Run every acceptance check and print a pass/fail table
    Verify,
}

#[derive(Debug, Subcommand)]
enum CapacitorOp {
    /// Measurement-triggered writes: bath heat and control cost
    Write,
    /// Write then erase by thermalization for the erase duration
    Erase,
    /// Remaining information and bath heat versus erase duration
    MiCurve,
}

#[derive(Debug, Subcommand)]
enum DoublewellOp {
    /// Passive relaxation from one well
    Relax,
    /// Mean escape time versus barrier height
    Escape,
    /// Relaxation in contact with a hotter bath
    Heated,
}

#[derive(Debug, Subcommand)]
enum BoundsOp {
    /// Minimum dissipation of a bit flip with error probability p_e
    Brillouin,
    /// Self-entropy bound on erasure cooling
    Anderson,
    /// Erasure cooling of an ice-cube-tray bit against the self-entropy bound
    Icecube,
}

#[derive(Debug, Subcommand)]
enum InfoOp {
    /// Channel information at p_e and memory entropy at p0
    Eval,
}

impl Command {
    fn experiment(&self) -> Option<Experiment> {
        Some(match self {
            Command::Capacitor { op } => match op {
                CapacitorOp::Write => Experiment::CapacitorWrite,
                CapacitorOp::Erase => Experiment::CapacitorErase,
                CapacitorOp::MiCurve => Experiment::CapacitorMiCurve,
            },
            Command::Doublewell { op } => match op {
                DoublewellOp::Relax => Experiment::DoublewellRelax,
                DoublewellOp::Escape => Experiment::DoublewellEscape,
                DoublewellOp::Heated => Experiment::DoublewellHeated,
            },
            Command::Bounds { op } => match op {
                BoundsOp::Brillouin => Experiment::BoundsBrillouin,
                BoundsOp::Anderson => Experiment::BoundsAnderson,
                BoundsOp::Icecube => Experiment::BoundsIcecube,
            },
            Command::Info { op: InfoOp::Eval } => Experiment::InfoEval,
            Command::Verify => return None,
        })
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut cfg = match ExperimentConfig::resolve(&cli.flags) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };

    let Some(experiment) = cli.command.experiment() else {
        let results = verify::run_all(cfg.master_seed, cfg.worker_count);
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        let _ = write!(out, "{}", verify::render_table(&results));
        return if results.iter().all(|r| r.passed) {
            EXIT_OK
        } else {
            EXIT_RUNTIME
        };
    };

    if cfg.n_trajectories.is_none() {
        cfg.n_trajectories = experiment.default_trajectories();
    }
    let table = match experiment.run(&cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let emitted = match emit_outputs(&table, &cfg) {
        Ok(em) => em,
        Err(e) => {
            eprintln!("error: cannot write outputs: {e}");
            return EXIT_RUNTIME;
        }
    };
    if experiment == Experiment::BoundsIcecube {
        print_icecube_block(&cfg, &table.rows[0]);
    }
    let summary = json!({
        "command": experiment.name(),
        "config": emitted.manifest.config,
        "summary": table.summary,
        "outputs": {
            "csv": emitted.csv_path,
            "config": emitted.config_path,
            "manifest": emitted.manifest_path,
        },
        "checksums": emitted.manifest.checksums,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );
    EXIT_OK
}

fn print_icecube_block(cfg: &ExperimentConfig, row: &[f64]) {
    let model = ice_model(cfg);
    eprintln!("ice-cube erasure at {} K ambient", cfg.ambient_k);
    eprintln!(
        "  cube volume            {} cm^3 ({:.4} g)",
        cfg.volume_cm3,
        model.mass_grams()
    );
    eprintln!(
        "  cooling of environment {:.4e} J = {:.4e} kT",
        row[0], row[1]
    );
    eprintln!("  self-entropy bound     {:.4} kT (1 bit)", row[2]);
    eprintln!("  violation factor       {:.4e}", row[3]);
}

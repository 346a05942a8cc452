//! `tuplevar`: certify, inspect and generate matrix tuples.
//!
//! Exit codes: 0 generic, 10 on the variety, 20 indeterminate, 1 input
//! error, 2 generation failure.

mod commands;
mod document;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tuplevar", version, about = "Invariant-subspace span certificates for matrix tuples")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; flags beat `TUPLEVAR_*` variables,
/// which beat the defaults.
#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Tuple document to read instead of stdin.
    #[arg(long, global = true, env = "TUPLEVAR_INPUT")]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, env = "TUPLEVAR_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Nats below the calibration scale for an on-variety verdict; the
    /// generic margin is half of it.
    #[arg(long, global = true, env = "TUPLEVAR_TOLERANCE_DROP", default_value_t = 23.0)]
    pub tolerance_drop: f64,
    /// Smallest eigenvalue gap treated as distinct.
    #[arg(long, global = true, env = "TUPLEVAR_GAP_TOL", default_value_t = 1e-8)]
    pub gap_tol: f64,
    /// Largest tensor dimension N to build.
    #[arg(long, global = true, env = "TUPLEVAR_SIZE_CAP", default_value_t = 4096)]
    pub size_cap: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide membership with the quotient certificate.
    Certify,
    /// Brute-force search for spanning-deficient eigenvector choices.
    Oracle,
    /// Print P, D factors, P-hat or degrees.
    Eval {
        #[arg(long, value_enum, ignore_case = true)]
        which: Which,
        /// k' for `--which D`, comma separated.
        #[arg(long, value_delimiter = ',')]
        sub_partition: Option<Vec<usize>>,
        /// Partition for `--which degrees` without an input document.
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
    },
    /// Write a seeded tuple document to stdout.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<usize>,
        /// Colliding sub-partition k' for `collision`.
        #[arg(long, value_delimiter = ',')]
        sub_partition: Option<Vec<usize>>,
    },
    /// Run the acceptance checks.
    Selftest {
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        /// Tuples of each kind per partition in the zero-set check.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "P")]
    P,
    #[value(name = "D")]
    D,
    #[value(name = "Phat")]
    Phat,
    #[value(name = "degrees")]
    Degrees,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Random,
    OnVariety,
    Collision,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { commands::EXIT_INPUT } else { 0 });
        }
    };
    let g = &cli.global;
    let outcome = match cli.command {
        Command::Certify => commands::certify(g),
        Command::Oracle => commands::oracle(g),
        Command::Eval {
            which,
            sub_partition,
            partition,
        } => commands::eval(g, which, sub_partition, partition),
        Command::Gen {
            kind,
            n,
            partition,
            sub_partition,
        } => commands::generate(g, kind, n, partition, sub_partition),
        Command::Selftest { max_n, samples } => commands::selftest(g, max_n, samples),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

//! `conductors`: exact conductor computations and verification suites from
//! the command line.
//!
//! Exit status is 0 when everything checked holds, 1 when some inequality or
//! identity fails (the failing inputs are dumped as replayable documents),
//! and 2 for unusable input.

mod commands;
mod groups;
mod input;
mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use conductor_core::suite::Suite;
use thiserror::Error;

pub use groups::parse_group;
pub use output::Format;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

pub const WORKERS_ENV: &str = "CONDUCTORS_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "conductors", version, about = "Exact Artin and Swan conductor calculus")]
pub struct Cli {
    /// Output format: aligned text, or one JSON document per line.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    /// Worker threads for suite evaluation (0 = one per core).
    #[arg(long, env = WORKERS_ENV, default_value_t = 0, global = true)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run seeded verification suites and the pinned corpus cases.
    Verify(VerifyArgs),
    /// Re-evaluate a counterexample document.
    Replay {
        /// Counterexample file, or `-` for stdin.
        path: PathBuf,
    },
    /// Conductors and tensor-product bounds for one local pair.
    Bound {
        /// Local pair document, or `-` for stdin.
        path: PathBuf,
    },
    /// Global conductor bounds from per-prime data.
    Global {
        /// Global datum document, or `-` for stdin.
        path: PathBuf,
    },
    /// Conductors of the `y^2 = x^p - alpha` Jacobian pair.
    Sharpness(SharpnessArgs),
    /// Print a character table.
    Table {
        /// Group, e.g. `affine(5)`, `quaternion8`, `direct_product(cyclic(2),cyclic(3))`,
        /// or a JSON descriptor such as `{"kind": "dihedral", "n": 4}`.
        group: String,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run (repeatable); all suites when omitted.
    #[arg(long = "suite", value_parser = parse_suite)]
    pub suites: Vec<Suite>,

    /// Seeded items per suite.
    #[arg(long, default_value_t = 100)]
    pub seeds: usize,

    /// Base seed; item seeds derive from it, the suite and the item index.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Corpus file; the shipped corpus when omitted.
    #[arg(long)]
    pub corpus: Option<PathBuf>,

    /// Skip the pinned corpus cases.
    #[arg(long)]
    pub no_pinned: bool,

    /// Also write each counterexample to its own file in this directory.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SharpnessArgs {
    /// Odd prime.
    #[arg(long, required_unless_present = "max_p", conflicts_with = "max_p")]
    pub p: Option<u64>,

    /// Unit parameter; the smallest valid one when omitted.
    #[arg(long, requires = "p", allow_negative_numbers = true)]
    pub a: Option<i64>,

    /// Sweep every odd prime up to this bound with the smallest valid unit.
    #[arg(long)]
    pub max_p: Option<u64>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse::<Suite>().map_err(|_| {
        let names: Vec<String> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("unknown suite `{s}` (expected one of {})", names.join(", "))
    })
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

/// Whether every check of a command held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Violation,
}

/// Runs one command, writing results to `out` and diagnostics to `err`, and
/// returns the process exit status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start {} workers: {e}", cli.workers);
            return EXIT_INPUT;
        }
    };
    let mut sink = output::Sink::new(cli.format, out);
    let result = commands::dispatch(&cli.command, &mut sink, &pool);
    match result {
        Ok(Status::Pass) => EXIT_PASS,
        Ok(Status::Violation) => EXIT_VIOLATION,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

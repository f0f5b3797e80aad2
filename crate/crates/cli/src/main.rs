//! `pisano` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 I/O or checkpoint error,
//! 3 Wall-Sun-Sun prime found, 4 consistency anomaly.

mod commands;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use pisano::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_WSS_HIT: u8 = 3;
pub const EXIT_ANOMALY: u8 = 4;

/// Environment variable naming the default directory for scan checkpoints.
pub const CHECKPOINT_DIR_ENV: &str = "PISANO_CHECKPOINT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "pisano",
    version,
    about = "Fibonacci numbers modulo m: periods, good numbers, Wall-Sun-Sun primes"
)]
pub struct Cli {
    /// Emit one JSON document on stdout; human-readable text goes to stderr.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The n-th Fibonacci number, exact or reduced modulo --mod.
    Fib {
        n: u64,
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Period, rank of apparition and zero count of m.
    Profile { m: u64 },
    /// Prime factorization of n.
    Factor { n: u64 },
    /// Good-number classification of m or of every m in a range.
    Good {
        m: Option<u64>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], conflicts_with = "m")]
        range: Option<Vec<u64>>,
        #[arg(long, default_value = "both")]
        method: String,
    },
    /// Per-prime data: (p/5), period, epsilon, P1/P2 class, Wall-Sun-Sun test.
    Prime { p: u64 },
    /// Tests m^2 | u_{γ(m)} for one m, or lists all such m up to --max.
    SelfSquare {
        m: Option<u64>,
        #[arg(long, conflicts_with = "m")]
        max: Option<u64>,
    },
    /// Resumable Wall-Sun-Sun scan over [--from, --to].
    WssScan {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Checkpoint file; defaults to wss-<from>-<to>.json in $PISANO_CHECKPOINT_DIR or the working directory.
        #[arg(long)]
        checkpoint: Option<std::path::PathBuf>,
        /// Per-prime results, one JSON object per line.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[arg(long, default_value_t = pisano::scan::DEFAULT_BLOCK_SIZE)]
        block_size: u64,
        /// Stop after this many committed blocks; rerun to resume.
        #[arg(long)]
        max_blocks: Option<usize>,
    },
    /// Audits the property suites against brute-force oracles.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        max: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

/// The document printed in `--json` mode.
#[derive(Debug, Serialize)]
pub struct CommandResult {
    pub command: String,
    pub inputs: Value,
    pub output: Value,
    pub elapsed_ms: f64,
}

/// What a command produced: payload, human summary and exit code.
pub struct Outcome {
    pub inputs: Value,
    pub output: Value,
    pub text: String,
    pub exit: u8,
}

pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io { .. } | Error::Checkpoint { .. } => EXIT_IO,
        Error::Anomaly(_) | Error::Internal(_) => EXIT_ANOMALY,
        Error::Domain(_) | Error::Overflow(_) | Error::Resource(_) => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let started = Instant::now();
    let name = commands::name(&cli.command);
    match commands::run(&cli.command) {
        Ok(out) => {
            if cli.json {
                let doc = CommandResult {
                    command: name.to_owned(),
                    inputs: out.inputs,
                    output: out.output,
                    elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
                };
                eprintln!("{}", out.text);
                println!(
                    "{}",
                    serde_json::to_string(&doc).expect("command result serializes")
                );
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(out.exit)
        }
        Err(e) => {
            let code = exit_code_for(&e);
            eprintln!("pisano {name}: {e}");
            if cli.json {
                let doc = CommandResult {
                    command: name.to_owned(),
                    inputs: Value::Null,
                    output: serde_json::json!({ "error": e.to_string(), "exit_code": code }),
                    elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
                };
                println!(
                    "{}",
                    serde_json::to_string(&doc).expect("command result serializes")
                );
            }
            ExitCode::from(code)
        }
    }
}

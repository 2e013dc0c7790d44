//! `bratteli`: command-line front end for ordered Bratteli diagrams and
//! premorphisms.
//!
//! Exit codes: 0 success or verified, 1 property refuted, 2 inconclusive
//! (search depth exhausted), 3 input or parse error.

mod commands;
mod files;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bratteli",
    version,
    about = "Ordered Bratteli diagrams, premorphisms and certificates"
)]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check a diagram (.obd) or premorphism (.opm) for invariant violations.
    Validate { file: PathBuf },
    /// Telescope a diagram along levels such as "0 2 tail +2".
    Telescope {
        file: PathBuf,
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Insert the given words over level k-1 as a new level below level k.
    Pack {
        file: PathBuf,
        #[arg(long)]
        level: usize,
        /// Code words, each a quoted list of letters ("x x y").
        #[arg(required = true)]
        words: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the successor map on paths of a fixed depth.
    Vershik {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Start from the minimal path into this letter of the deepest level.
        #[arg(long)]
        letter: Option<String>,
        /// Start from a random path instead.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Prefix of the word σ_{[level,depth]}(letter).
    Word {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        letter: String,
        #[arg(long, default_value_t = 64)]
        length: usize,
    },
    /// Incidence matrix of one level, or the product from --level to --depth.
    Matrix {
        file: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Largest level size and the level sizes.
    Rank { file: PathBuf },
    /// Print both sides of every commutativity square of a premorphism.
    PremorphismCheck {
        file: PathBuf,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Images of B2 paths of depth f_n under the induced factor map.
    FactorMap {
        file: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        letter: Option<String>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Sample paths at random instead of taking the first ones.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build a diagram equivalent to B1 of rank at most 3 rank(B2).
    RankReduce {
        file: PathBuf,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        max_depth: u64,
        /// Certificate path; the reduced diagram goes next to it as .obd.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the conjugacy criterion and certify B1 and B2 equivalent.
    Conjugacy {
        file: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        max_depth: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a certificate against the diagrams it references.
    VerifyCert { file: PathBuf },
}

/// Outcome classes with their exit codes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Success = 0,
    Refuted = 1,
    Inconclusive = 2,
    InputError = 3,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Status::InputError as u8),
            };
        }
    };
    let status = match commands::run(cli.command, cli.json) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {}", e.0);
            Status::InputError
        }
    };
    ExitCode::from(status as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod inputs;
mod report;

#[derive(Parser, Debug)]
#[command(name = "gks", version, about = "Build and verify Kochen-Specker and generalized Kochen-Specker proofs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit a built-in or file ray set in canonical form.
    Rayset {
        /// 24cell, dual24cell, peres24, rays18 or hexagon.
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate every orthogonal basis of a ray set as a basis cover.
    Bases {
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-verify a cover and print its incidence table and parity certificate.
    Verify {
        /// Built-in cover name (see `gks verify --help`), or use --rays/--cover.
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether an exactly-one 0/1 assignment exists.
    Search {
        name: Option<String>,
        /// Also run the brute-force oracle (at most 25 elements).
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Delete each element in turn and search the remainder.
    Critical {
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Export the cover as DIMACS CNF, or check an external solver model.
    Cnf {
        name: Option<String>,
        /// Solver output (`v` lines or bare literals) to check against the cover.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate the spin-j construction over n directions, grouped r at a time.
    Spin {
        /// Spin quantum number: 1/2, 1, 3/2, ...
        #[arg(long, default_value = "1/2")]
        j: String,
        #[arg(long, default_value_t = 2)]
        r: u64,
        /// Direction file with `dir <theta> <phi>` lines.
        #[arg(long, conflicts_with = "random")]
        dirs: Option<PathBuf>,
        /// Use this many random directions instead of the hexagon diameters.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// List (n, r) with C(n,r) odd and C(n,r) - C(n-1,r) even.
    Params {
        n_max: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Ray set file.
    #[arg(long)]
    rays: Option<PathBuf>,
    /// Cover file (requires --rays).
    #[arg(long)]
    cover: Option<PathBuf>,
    /// Write the output here instead of stdout (`spin`: file prefix).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Semantics::Drop)]
    semantics: Semantics,
    /// Search worker threads; 1 keeps runs reproducible.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Comparison tolerance for floating ray sets.
    #[arg(long, default_value_t = gks_core::algebra::TOL_ID)]
    tolerance: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, Default, PartialEq, Eq)]
enum Semantics {
    #[default]
    Drop,
    Shrink,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let echo = format!("gks {}", argv.join(" "));
    match commands::run(cli.command, &echo) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

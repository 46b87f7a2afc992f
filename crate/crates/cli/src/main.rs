//! `branchdim`: dimensions of Bernoulli measures for countable branched
//! interval maps.
//!
//! Exit codes: 0 success, 1 negative result (no certificate, failed
//! validation, indeterminate bracket), 2 configuration error, 3 budget
//! exceeded.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, Rule};

#[derive(Debug, Parser)]
#[command(name = "branchdim", version, about = "Dimensions of Bernoulli measures on countable branched interval maps")]
struct Cli {
    /// TOML run configuration; flags given on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Default, Args)]
struct SystemArgs {
    /// Catalog system: gauss, luroth, affine, example_tangent.
    #[arg(long, value_name = "NAME")]
    system: Option<String>,
    /// System definition file (TOML).
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// Branch lengths for the affine system.
    #[arg(long, value_delimiter = ',', value_name = "L1,L2,..")]
    lengths: Option<Vec<f64>>,
    /// Affine tail branches for example_tangent.
    #[arg(long)]
    tail_branches: Option<usize>,
    /// Explicit branch prefix for the countable families.
    #[arg(long)]
    prefix: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy, Lyapunov and dimension brackets for one probability vector.
    Dim {
        #[command(flatten)]
        system: SystemArgs,
        /// Probability vector: `0.5,0.5`, `1/3,1/3,1/3` or a file path.
        #[arg(long, value_name = "P")]
        p: Option<String>,
        /// Cylinder depth (default: 8, lowered to fit the budget).
        #[arg(long)]
        depth: Option<usize>,
        /// Use only the per-cylinder extremes of log|T'| (same as `--rule coarse`).
        #[arg(long)]
        coarse_bound: bool,
        #[arg(long, value_enum, conflicts_with = "coarse_bound")]
        rule: Option<Rule>,
        /// Maximum number of cylinder words.
        #[arg(long)]
        budget: Option<u128>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Dimension-maximizing vectors on L symbols.
    Maximize {
        #[command(flatten)]
        system: SystemArgs,
        /// A single L or an inclusive range `A..B`.
        #[arg(long = "L", value_name = "L")]
        l: Option<String>,
        /// Cylinder depth for every L (default: budgeted per L).
        #[arg(long)]
        depth: Option<usize>,
        /// Exponent for the fitted decay constants.
        #[arg(long)]
        alpha: Option<f64>,
        /// Random starts besides the uniform vector.
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write `L midpoint half_width` columns here.
        #[arg(long, value_name = "PATH")]
        plot: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u128>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Search for periodic orbits whose cycle derivatives certify a dimension gap.
    Gapcert {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long)]
        max_symbol: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        budget: Option<u128>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spot-check the standing hypotheses on a system.
    Validate {
        #[command(flatten)]
        system: SystemArgs,
        /// Sample points per branch.
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}

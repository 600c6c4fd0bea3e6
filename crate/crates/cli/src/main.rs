//! `designforge`: verify, solve, tune and regression-check combinatorial
//! designs.
//!
//! Exit status: 0 success or valid, 1 invalid design or failing fixture,
//! 2 no solution within the budget, 3 usage, parse or configuration error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use designforge::designs::DesignFamily;
use designforge::harness::PARALLELISM_ENV;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_UNSOLVED: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "designforge", version, about = "Verify and search for combinatorial designs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a matrix file against an instance.
    Verify(VerifyArgs),
    /// Search for a design.
    Solve(SolveArgs),
    /// Tune an algorithm's hyperparameters on development instances.
    Tune(TuneArgs),
    /// Run an algorithm over every instance of a manifest and report.
    Batch(BatchArgs),
    /// Verify every design in a fixture directory.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct InstanceArgs {
    /// PA, SymmW, SkewW, BTD, FR or EPA (any case).
    #[arg(long)]
    family: DesignFamily,
    /// Named parameters, e.g. `n=12,d=8,m=21`. Names per family:
    /// PA N,k,v; SymmW/SkewW n,w; BTD V,B,p1,p2,R,K,L; FR r,n; EPA n,d,m.
    #[arg(long)]
    params: String,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Wall-clock budget per run, in seconds.
    #[arg(long, conflicts_with = "iters")]
    time: Option<f64>,
    /// Iteration budget per run; makes runs reproducible.
    #[arg(long)]
    iters: Option<u64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Matrix file: one row per line, whitespace-separated integers.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// local-search, sa-const, sa-reset, ga or dfs. Defaults by family.
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Hyperparameter overrides, e.g. `T=0.444444`.
    #[arg(long, default_value = "")]
    hyper: String,
    /// Also write the solution matrix to this file.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[arg(long)]
    family: DesignFamily,
    #[arg(long)]
    algorithm: Option<String>,
    /// JSON manifest of development instances.
    #[arg(long)]
    manifest: PathBuf,
    /// `desk` (100 points, 0.1 s, scale 10) or `full` (1000, 0.5 s, 10).
    #[arg(long, default_value = "desk")]
    profile: String,
    #[arg(long)]
    grid_size: Option<usize>,
    /// First-round wall-clock budget per run, in seconds.
    #[arg(long)]
    init_time: Option<f64>,
    #[arg(long)]
    scale: Option<usize>,
    /// Seeds per instance. Defaults to the largest `seeds` in the manifest,
    /// or 4.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(long, env = PARALLELISM_ENV)]
    parallelism: Option<usize>,
    /// Write the per-round report (JSON) here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct BatchArgs {
    /// Instances to run; all must belong to families the algorithm supports.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    algorithm: String,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value = "")]
    hyper: String,
    #[arg(long, env = PARALLELISM_ENV)]
    parallelism: Option<usize>,
    /// Write the JSON report here as well as printing it.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct FixturesArgs {
    /// Directory holding the matrices and `manifest.json`.
    #[arg(default_value = "fixtures")]
    dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let result = match cli.command {
        Command::Verify(args) => commands::verify(args),
        Command::Solve(args) => commands::solve(args),
        Command::Tune(args) => commands::tune(args),
        Command::Batch(args) => commands::batch(args),
        Command::Fixtures(args) => commands::fixtures(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

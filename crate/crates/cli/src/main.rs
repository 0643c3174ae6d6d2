//! Seeded experiment runner: every library experiment as a subcommand.
//!
//! All randomness derives from the mandatory `--seed`; identical invocations
//! produce byte-identical `rows` output. Inputs are validated before any
//! randomness is consumed, so error paths never advance the stream.
//!
//! Exit codes: 0 success, 1 configuration or parse errors, 2 statistical
//! bound violations under `--assert` and semantic validation failures of
//! loaded data (non-commuting or incomplete projector sets).

mod config;
mod output;
mod run;

use clap::{Args, Parser, Subcommand};

use crate::output::OutputFormat;

#[derive(Parser)]
#[command(
    name = "bornsim",
    about = "Photon-scattering measurement statistics for a local observer",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo over one elementary scattering process.
    Scatter(ScatterArgs),
    /// Projector cascade distribution on a loaded projector set.
    Cascade(CascadeArgs),
    /// Branch-tree history experiment with recorded outcomes.
    Branches(BranchesArgs),
    /// Born-equivalence certification of the atom-photon table.
    Atom(AtomArgs),
    /// Rayleigh-integral quadrature against the closed form.
    Oracle(OracleArgs),
    /// Stripping report for an occupation-number fixture file.
    Strip(StripArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Config file of `key value` lines; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Master seed (required; there is no wall-clock default).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// `rows` (comma-separated numeric table) or `report` (human-readable).
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Turn statistical bounds into the exit code (0 pass, 2 fail).
    #[arg(long)]
    pub assert: bool,
}

#[derive(Args, Clone)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Builtin process: uniform, maximum, or born.
    #[arg(long)]
    pub process: Option<String>,
    /// Custom process table file (instead of a builtin).
    #[arg(long, conflicts_with = "process")]
    pub table: Option<std::path::PathBuf>,
    /// Qubit weight |a|^2 (with |b|^2 = 1 - |a|^2, real amplitudes).
    #[arg(long)]
    pub a2: Option<f64>,
    /// Full complex qubit `are,aim,bre,bim`; overrides --a2.
    #[arg(long)]
    pub qubit: Option<String>,
    /// Number of trials.
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Args, Clone)]
pub struct CascadeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Projector-set file.
    #[arg(long)]
    pub set: Option<std::path::PathBuf>,
    /// State to measure: comma-separated components, each `re` or `re:im`.
    #[arg(long)]
    pub psi: Option<String>,
    /// Number of cascade runs.
    #[arg(long)]
    pub runs: Option<u64>,
    /// Stage order as comma-separated projector indices (repeats allowed).
    #[arg(long)]
    pub order: Option<String>,
}

#[derive(Args, Clone)]
pub struct BranchesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Preparation weight |a|^2 (real amplitudes).
    #[arg(long)]
    pub a2: Option<f64>,
    /// Full complex preparation `are,aim,bre,bim`; overrides --a2.
    #[arg(long)]
    pub qubit: Option<String>,
    /// Recorded events per run (max 20).
    #[arg(long)]
    pub events: Option<usize>,
    /// Number of runs.
    #[arg(long)]
    pub runs: Option<u64>,
    /// Rescatter each branch's last outcome instead of re-preparing
    /// (enables history rewrites; record statistics become an empirical
    /// finding).
    #[arg(long)]
    pub rescatter: bool,
}

#[derive(Args, Clone)]
pub struct AtomArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Branch amplitude of the state-changing option (default 1/sqrt(2)).
    #[arg(long)]
    pub amp: Option<f64>,
    /// Trials per grid point.
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Args, Clone)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Magnitude ratio |a| / |b|.
    #[arg(long)]
    pub ratio: Option<f64>,
}

#[derive(Args, Clone)]
pub struct StripArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Occupation-number state fixture file.
    #[arg(long)]
    pub fixture: Option<std::path::PathBuf>,
    /// Relative tolerance for the degenerate-dominant check.
    #[arg(long)]
    pub tie_tolerance: Option<f64>,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Scatter(args) => run::scatter(args),
        Command::Cascade(args) => run::cascade(args),
        Command::Branches(args) => run::branches(args),
        Command::Atom(args) => run::atom(args),
        Command::Oracle(args) => run::oracle(args),
        Command::Strip(args) => run::strip(args),
    };
    match code {
        Ok(exit) => std::process::exit(exit),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

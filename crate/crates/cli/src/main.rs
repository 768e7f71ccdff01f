//! `permwalk`: exhaustive verification suites, exact distribution checks and
//! seeded Monte Carlo couplings for permuted walks on regular trees.
//!
//! Exit codes: `0` every check passed, `1` a mathematical violation was
//! found, `2` configuration or I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use permwalk::schedule::GrowthFn;
use permwalk::{Laziness, WalkKind};

const EXAMPLES: &str = "\
EXAMPLES:
  permwalk verify-iso --d 3 --depth 2
  permwalk verify-majorization --d 3 --random-schedules 100 --radius 10 --seed 1
  permwalk verify-majorization --d 2 --schedule shift.json --joint
  permwalk simulate --kind lazy --d 3 --T 100000 --seed 7 --output walk.csv
  permwalk couple --mode epochs --p 0.6667 --T 65536 --seed 3 --report gaps.json
  permwalk exceptional-times --T 1000000 --seed 1 --output exceptional.csv
  permwalk entropy --d 3 --random-radius 10 --seed 5

A --config TOML file supplies default flags: top-level keys apply to every
subcommand that accepts them, keys under [<subcommand>] to that one only.
Flags given on the command line win.";

#[derive(Debug, Parser)]
#[command(name = "permwalk", version, about = "Verification suites and simulations for permuted tree walks")]
#[command(after_help = EXAMPLES, args_override_self = true)]
struct Cli {
    /// TOML file of default flags
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exhaustive subset checks of the isoperimetric identity, lower bounds
    /// and multiplicity-profile dominance on a ball
    #[command(args_override_self = true)]
    VerifyIso(IsoArgs),
    /// Exact evolution of the plain and permuted walk with the majorization
    /// checks at every step
    #[command(args_override_self = true)]
    VerifyMajorization(MajorizationArgs),
    /// Monte Carlo depth trajectories of a (permuted) walk, as CSV
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Explicit couplings: automorphism composition, binomial epochs,
    /// single binomial coupling, slow-down composition
    #[command(args_override_self = true)]
    Couple(CoupleArgs),
    /// Translation schedule on Z that brings the permuted walk back near the
    /// origin at exceptional times
    #[command(args_override_self = true)]
    ExceptionalTimes(ExceptionalArgs),
    /// Per-step Shannon entropies of the plain and permuted distributions
    #[command(args_override_self = true)]
    Entropy(EntropyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Lazy,
    Simple,
}

impl From<Kind> for WalkKind {
    fn from(k: Kind) -> WalkKind {
        match k {
            Kind::Lazy => WalkKind::Lazy,
            Kind::Simple => WalkKind::Simple,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Arithmetic {
    /// Shared-denominator integers or big rationals
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoupleMode {
    Automorphism,
    Epochs,
    Binomial,
    Slowdown,
}

#[derive(Debug, Args)]
struct IsoArgs {
    /// Tree degree
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// Radius of the ball whose subsets are enumerated
    #[arg(long, visible_alias = "radius", default_value_t = 2)]
    depth: u32,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// JSON report path (stdout when absent)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

/// Walk parameters shared by the exact commands.
#[derive(Debug, Args)]
struct ExactWalk {
    /// Tree degree [default: the schedule's degree, else 3]
    #[arg(long)]
    d: Option<u32>,
    /// Walk kind
    #[arg(long, value_enum, default_value_t = Kind::Lazy)]
    kind: Kind,
    /// Laziness as a/b or an exact decimal [default: 1/(d+1)]
    #[arg(long)]
    gamma: Option<Laziness>,
    /// Number of steps
    #[arg(long, visible_alias = "T", default_value_t = 8)]
    horizon: usize,
    /// Schedule JSON file [default: identity schedule]
    #[arg(long, value_name = "PATH")]
    schedule: Option<PathBuf>,
    /// Arithmetic for the distributions
    #[arg(long, value_enum, default_value_t = Arithmetic::Exact)]
    arithmetic: Arithmetic,
}

#[derive(Debug, Args)]
struct MajorizationArgs {
    #[command(flatten)]
    walk: ExactWalk,
    /// Check this many uniformly random bijection schedules instead of one
    #[arg(long, default_value_t = 0, conflicts_with = "schedule")]
    random_schedules: u64,
    /// Radius of the ball permuted by random bijections
    #[arg(long, default_value_t = 10)]
    radius: u32,
    /// Master seed (required with --random-schedules)
    #[arg(long)]
    seed: Option<u64>,
    /// Also enumerate the exact law of |X_2| + |X_3| <= 2 for the plain and
    /// the permuted lazy walk
    #[arg(long)]
    joint: bool,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// JSON report path (stdout when absent)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EntropyArgs {
    #[command(flatten)]
    walk: ExactWalk,
    /// Use one random bijection schedule of the ball of this radius
    #[arg(long, conflicts_with = "schedule")]
    random_radius: Option<u32>,
    /// Master seed (required with --random-radius)
    #[arg(long)]
    seed: Option<u64>,
    /// CSV path (stdout when absent)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Tree degree [default: the schedule's degree, else 3]
    #[arg(long)]
    d: Option<u32>,
    /// Walk kind
    #[arg(long, value_enum, default_value_t = Kind::Lazy)]
    kind: Kind,
    /// Laziness as a/b or an exact decimal [default: 1/(d+1)]
    #[arg(long)]
    gamma: Option<Laziness>,
    /// Number of steps
    #[arg(long, visible_alias = "T", default_value_t = 100_000)]
    horizon: u64,
    /// Master seed; replicate r uses stream r
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicates: u64,
    /// Schedule JSON file applied after every step [default: none]
    #[arg(long, value_name = "PATH")]
    schedule: Option<PathBuf>,
    /// Emit every stride-th step (the last step is always emitted)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    stride: u64,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// CSV path with columns replicate,t,depth,speed (stdout when absent)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CoupleArgs {
    /// Which coupling to run
    #[arg(long, value_enum)]
    mode: CoupleMode,
    /// Tree degree (automorphism, slowdown) [default: the schedule's degree, else 3]
    #[arg(long)]
    d: Option<u32>,
    /// Walk kind (automorphism)
    #[arg(long, value_enum, default_value_t = Kind::Lazy)]
    kind: Kind,
    /// Laziness (automorphism) [default: 1/(d+1)]
    #[arg(long)]
    gamma: Option<Laziness>,
    /// Up-probability as a/b or an exact decimal (epochs, binomial)
    #[arg(long, default_value = "2/3")]
    p: String,
    /// Number of trials (binomial)
    #[arg(long, default_value_t = 64)]
    n: u64,
    /// Shift on the window J (binomial) [default: max(1, floor(sqrt(n)/ln(n)^2))]
    #[arg(long)]
    m: Option<u64>,
    /// Arithmetic for the joint law (binomial)
    #[arg(long, value_enum, default_value_t = Arithmetic::Exact)]
    arithmetic: Arithmetic,
    /// Number of steps
    #[arg(long, visible_alias = "T", default_value_t = 65_536)]
    horizon: u64,
    /// Exponent c in the thresholds sqrt(t)/(ln t)^c and sqrt(t)/(ln t)^(2c)
    #[arg(long, default_value_t = 4.0)]
    c: f64,
    /// A replicate settles when its gap condition holds on [t0, T] for some
    /// t0 <= this bound [default: horizon/4]
    #[arg(long)]
    settle_by: Option<u64>,
    /// Schedule JSON of automorphisms (automorphism, slowdown) [default: identity]
    #[arg(long, value_name = "PATH")]
    schedule: Option<PathBuf>,
    /// Use a random edge-shift schedule, shifting at each step with this probability
    #[arg(long, conflicts_with = "schedule")]
    shift_rate: Option<f64>,
    /// Master seed (required by every mode except binomial)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    replicates: u64,
    /// Keep every stride-th row of the gap series (the last row is always kept)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    stride: u64,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// CSV path: gap series of replicate 0, or the joint law in binomial mode
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// JSON report path (stdout when absent)
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExceptionalArgs {
    /// Number of steps
    #[arg(long, visible_alias = "T", default_value_t = 1_000_000)]
    horizon: u64,
    /// Block length f: log2, const:K or root:K
    #[arg(long, default_value = "log2")]
    growth: GrowthFn,
    /// Master seed; replicate r uses stream r
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicates: u64,
    /// Keep every stride-th row of the series (the last row is always kept)
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    stride: u64,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// CSV path: series of replicate 0 with the running max of gap/phi(t)
    /// (stdout when absent)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// JSON summary of every replicate
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match config::merge(&raw, &Cli::command()) {
        Ok(args) => args,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let meta = output::Meta { argv: raw, effective: args };
    match commands::run(cli.command, &meta) {
        Ok(outcome) => ExitCode::from(outcome as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

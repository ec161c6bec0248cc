//! `newton-depth`: Newton polytopes of integral ReLU networks from the shell.
//!
//! Exit status: 0 success, 1 verification or certificate failure, 2 input or
//! schema error, 3 caps exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "newton-depth", version, about = "Exact Newton-polytope toolkit for integral ReLU networks")]
pub struct Cli {
    /// Write the JSON artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Largest ambient dimension accepted.
    #[arg(long, global = true, default_value_t = 8)]
    pub max_dim: usize,

    /// Largest vertex count of any polytope built.
    #[arg(long, global = true, default_value_t = 512)]
    pub max_vertices: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    Sum,
    Conv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Newton-polytope pairs (with construction trees) of every output.
    Compile { network: PathBuf },
    /// Evaluate a network or a polytope pair at a rational point.
    Eval {
        input: PathBuf,
        /// Comma-separated rationals, e.g. `3,-1/2`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Normalized volume.
    Volume { polytope: PathBuf },
    /// Faces of dimension at least `--min-dim` with their volumes.
    Faces {
        polytope: PathBuf,
        #[arg(long, default_value_t = 0)]
        min_dim: usize,
    },
    /// Minkowski sum of two polytopes.
    Msum { a: PathBuf, b: PathBuf },
    /// Convex hull of the union of two polytopes.
    Chull { a: PathBuf, b: PathBuf },
    /// Regular subdivision of `A + B` or `conv(A ∪ B)` from a generic lift.
    Subdivide {
        #[arg(value_enum)]
        op: OpArg,
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        seed: u64,
    },
    /// Random member of P_k with its construction tree.
    SamplePk {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        coord_range: i64,
        #[arg(long, default_value_t = 3)]
        fanout: usize,
    },
    /// Network computing `g − h` from two construction trees.
    Synthesize { g_tree: PathBuf, h_tree: PathBuf },
    /// Parity ledger deciding membership in Q_k.
    CheckQk {
        polytope: PathBuf,
        #[arg(long)]
        k: u32,
        /// Stop at the first odd face.
        #[arg(long)]
        short_circuit: bool,
    },
    /// Certificate that max{0, x_1, ..., x_{2^k}} needs more than k integral hidden layers.
    Certify {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        seed: u64,
        /// Sampled P_k members (default 100, or 25 for k >= 2).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 100)]
        eval_points: usize,
        /// Only report the parity ledger of 2·simplex at level k.
        #[arg(long)]
        explore_double: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    commands::run(&cli)
}

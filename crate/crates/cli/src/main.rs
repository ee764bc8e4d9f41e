use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reebli::Rational;

mod commands;

#[derive(Parser)]
#[command(name = "reebli", version, about = "Interleaving distances on Reeb graphs, contour trees and merge trees")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(flatten)]
    input: InputFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct InputFlags {
    /// Accept decimal literals in input, converted exactly.
    #[arg(long, global = true)]
    allow_decimal: bool,
    /// Break value ties by node order instead of rejecting them.
    #[arg(long, global = true)]
    perturb: bool,
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check every graph invariant.
    Validate { file: PathBuf },
    /// Print each node's class.
    Classify { file: PathBuf },
    /// Smooth a graph and write the result.
    Smooth {
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Labeled interleaving distance.
    Dist {
        #[command(subcommand)]
        kind: DistKind,
    },
    /// ε-essential classification of every critical node.
    Essential {
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        file: PathBuf,
    },
    /// Height of every simple cycle.
    LoopHeight { file: PathBuf },
    /// Join-split structures of a contour tree.
    JsSpread { file: PathBuf },
    /// Test a candidate midpoint against the necessary conditions.
    Obstruct {
        kind: Family,
        #[arg(long, value_parser = parse_rational)]
        alpha: Rational,
        candidate: PathBuf,
    },
    /// Run a counterexample end to end.
    Demo {
        kind: DemoKind,
        #[arg(long, value_parser = parse_rational, default_value = "8")]
        alpha: Rational,
    },
    /// Build a tree from a CSV scalar grid.
    Ingest {
        kind: TreeKind,
        grid: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a graph in DOT.
    ExportDot {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DistKind {
    /// Matrix form for labeled merge trees.
    Merge { t1: PathBuf, t2: PathBuf },
    /// General algorithm for labeled contour trees.
    Contour {
        t1: PathBuf,
        t2: PathBuf,
        /// Search the event values (default).
        #[arg(long, conflicts_with = "bisect")]
        events: bool,
        /// Bisect for N rounds instead.
        #[arg(long, value_name = "N")]
        bisect: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Reeb,
    Contour,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoKind {
    ReebCounterexample,
    ContourCounterexample,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeKind {
    Merge,
    Contour,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    Rational::parse_exact(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            out.print(cli.json);
            ExitCode::from(out.code)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}

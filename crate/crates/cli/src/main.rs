//! Command-line front end: builds shapes, runs the checks and cross-check
//! suites, and writes a reproducible report.

mod commands;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use report::RunReport;

/// Environment variable holding the default truncation, e.g. `3,3`.
pub const TRUNC_ENV: &str = "SIMPFIB_TRUNC";

#[derive(Parser, Debug)]
#[command(name = "simpfib", version, about = "Finite simplicial presheaves, fibrations and locality checks")]
struct Cli {
    /// Print the run report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the run report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct TruncArg {
    /// Truncation bounds, comma separated; falls back to $SIMPFIB_TRUNC.
    #[arg(long)]
    pub trunc: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named shape and write it as JSON.
    Build {
        /// delta, boundary, horn, J, F, dF, E, G, F2, dF2, chaotic, vertex, e-vertex
        kind: String,
        params: Vec<usize>,
        #[command(flatten)]
        trunc: TruncArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the canonical inclusion instead of the object.
        #[arg(long)]
        inclusion: bool,
    },
    /// Space of maps X -> Y, or of maps over a common base.
    MapSpace {
        x: PathBuf,
        y: PathBuf,
        /// Treat X and Y as maps into a common base and take maps over it.
        #[arg(long)]
        over: bool,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pushout-product of two monomorphisms.
    Pp {
        i: PathBuf,
        j: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pullback-exponential of a monomorphism and a map.
    Pexp {
        i: PathBuf,
        p: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Right lifting property against a generating family.
    Rlp {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        f: PathBuf,
    },
    /// Small-object factorization against a generating family.
    Factor {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Nondegenerate cells that may be attached.
        #[arg(long, default_value_t = 64)]
        budget: usize,
        f: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Integral homology of the diagonal.
    Homology {
        x: PathBuf,
        #[arg(long, default_value_t = 2)]
        maxdim: usize,
    },
    /// Weak equivalence of the diagonal.
    Weq {
        f: PathBuf,
        #[arg(long, default_value = "high")]
        effort: String,
    },
    /// Fibration class membership.
    Check {
        /// kan, reedy, left, right, reedy-left, reedy-right, segal-cocart,
        /// segal-cart, cocart, cart, left3, right3
        #[arg(long)]
        kind: String,
        p: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
        #[command(flatten)]
        trunc: TruncArg,
        #[arg(long, default_value = "high")]
        effort: String,
    },
    /// Category of elements of a diagram, as a map onto the nerve.
    Groth {
        diagram: PathBuf,
        #[arg(long, default_value_t = 2)]
        base_bound: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seeded diagram corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Cross-check suites over the corpus.
    Verify {
        /// A suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        size: usize,
        #[command(flatten)]
        trunc: TruncArg,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusAction {
    Generate {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        size: usize,
        #[command(flatten)]
        trunc: TruncArg,
        /// Directory for one diagram file per entry.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// The arguments that determine the result: global presentation flags are
/// dropped so reports compare across thread counts.
fn recorded_command(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        match a.as_str() {
            "--json" => {}
            "--threads" | "--report" => skip = true,
            s if s.starts_with("--threads=") || s.starts_with("--report=") => {}
            s => out.push(s.to_string()),
        }
    }
    out
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&args);
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            std::process::exit(3);
        }
    }
    let mut report = RunReport::new(recorded_command(&args));
    if let Err(e) = commands::run(&cli.command, &mut report, &commands::Ctx { json: cli.json }) {
        report.error = Some(format!("{e:#}"));
    }
    if cli.json {
        println!("{}", report.to_json());
    } else {
        commands::print_text(&report);
    }
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: {}: {e}", path.display());
            std::process::exit(3);
        }
    }
    std::process::exit(report.exit_code());
}

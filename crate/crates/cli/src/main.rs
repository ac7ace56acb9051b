//! `preduals`: runs verification suites and prints one JSON report per line.
//!
//! Exit status: 0 when no report failed, 1 when at least one did, 2 for usage
//! errors and 3 for configuration, file or computation errors.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use preduals_core::{Error, LambdaParam, Report};
use rayon::prelude::*;

use crate::commands::Job;

#[derive(Parser, Debug)]
#[command(name = "preduals", version, about = "Finite-scale verification of shift-invariant preduals of l1(Z)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; report order does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Record wall time in `runtime_ms` (output is then no longer reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Operator identities, limit laws, disjointness and pairings of x0.
    VerifyXzero(XzeroArgs),
    /// Extend a finitely supported sequence and certify the extension.
    Extend(ExtendArgs),
    /// Norms of convolution powers of a named element.
    PowerTable(PowerArgs),
    /// Additive sparseness and the separation condition for a set.
    SparseCheck(SparseArgs),
    /// Homomorphism, kernel, involution and idempotent checks of a projection.
    SemigroupTheta(ThetaArgs),
    /// Limits of embedded sequences in the compactified semigroup.
    LimitSim(LimitArgs),
    /// Ball-shrink witnesses and separation chains.
    SzlenkProbe(SzlenkArgs),
    /// Every suite with default parameters.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
pub struct XzeroArgs {
    /// Lambda as RE[,IM]; integers and p/q stay exact.
    #[arg(long, default_value = "2")]
    pub lambda: String,
    /// Radius of the verification window.
    #[arg(long, default_value_t = 4096)]
    pub window: i64,
    /// Depth of the dyadic class sequences.
    #[arg(long, default_value_t = 60)]
    pub depth: u32,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    #[arg(long, default_value = "2")]
    pub lambda: String,
    /// Entries `n=VALUE` separated by `;`, values as RE[,IM].
    #[arg(long)]
    pub y: String,
    #[arg(long, default_value_t = 1024)]
    pub window: i64,
    /// Write `n,re,im` rows of the extension on the window.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PowerArgs {
    /// newman, binomial, delta1, scalar or double.
    #[arg(long, default_value = "newman")]
    pub element: String,
    #[arg(long, default_value = "2")]
    pub lambda: String,
    #[arg(long, default_value_t = 128)]
    pub max_m: u32,
    /// Power bound probed against the l1 column.
    #[arg(long, default_value_t = 2.0)]
    pub bound: f64,
    /// Write the `m,l1,sup` table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SparseArgs {
    /// Set description such as `powers:2`, `factorials` or `explicit:1,5,9`.
    #[arg(long, default_value = "powers:2")]
    pub set: String,
    /// Largest member magnitude searched.
    #[arg(long, default_value_t = 1 << 16)]
    pub bound: u64,
    /// Largest shift |t|.
    #[arg(long, default_value_t = 100)]
    pub t: i64,
    /// Maximal number of summands on each side.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Pieces in the split family.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
}

#[derive(Args, Debug)]
pub struct ThetaArgs {
    /// TOML projection spec, or `default`.
    #[arg(long, default_value = "default")]
    pub config: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    #[arg(long, default_value = "default")]
    pub config: String,
    /// Number of dyadic thresholds.
    #[arg(long, default_value_t = 10)]
    pub depth: u32,
    /// Sequence length.
    #[arg(long, default_value_t = 16)]
    pub max_m: usize,
    /// Cells sampled by the topology check.
    #[arg(long, default_value_t = 200)]
    pub cells: usize,
}

#[derive(Args, Debug)]
pub struct SzlenkArgs {
    #[arg(long, default_value = "2")]
    pub lambda: String,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    /// Largest power in the separation chain.
    #[arg(long, default_value_t = 20)]
    pub depth: u32,
    #[arg(long, default_value = "default")]
    pub config: String,
    /// Random admissible families to test.
    #[arg(long, default_value_t = 8)]
    pub families: usize,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, default_value = "default")]
    pub config: String,
    #[arg(long, default_value = "2")]
    pub lambda: String,
}

pub fn lambda(text: &str) -> preduals_core::Result<LambdaParam> {
    LambdaParam::parse(text)
}

fn jobs(cmd: &Command, common: &Common) -> preduals_core::Result<Vec<Job>> {
    match cmd {
        Command::VerifyXzero(a) => commands::verify_xzero(a, common.seed),
        Command::Extend(a) => commands::extend(a),
        Command::PowerTable(a) => commands::power_table(a),
        Command::SparseCheck(a) => commands::sparse_check(a),
        Command::SemigroupTheta(a) => commands::semigroup_theta(a, common.seed),
        Command::LimitSim(a) => commands::limit_sim(a, common.seed),
        Command::SzlenkProbe(a) => commands::szlenk_probe(a, common.seed),
        Command::Suite(a) => commands::suite(a, common.seed),
    }
}

fn run(cli: &Cli) -> preduals_core::Result<bool> {
    let jobs = jobs(&cli.command, &cli.common)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let timing = cli.common.timing;
    let results: Vec<preduals_core::Result<Vec<Report>>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let (out, ms) = preduals_core::report::timed(job);
                out.map(|reports| {
                    reports
                        .into_iter()
                        .map(|r| if timing { r.runtime(ms) } else { r })
                        .collect()
                })
            })
            .collect()
    });
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut printed = Vec::new();
    for result in results {
        for r in result? {
            writeln!(out, "{}", r.to_json_line())?;
            printed.push(r);
        }
    }
    if matches!(cli.command, Command::Suite(_)) {
        let s = commands::summary(&printed);
        writeln!(out, "{}", s.to_json_line())?;
    }
    out.flush()?;
    Ok(!printed.iter().any(Report::is_fail))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

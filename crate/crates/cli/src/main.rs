mod commands;
mod error;
mod io;
mod methods;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use error::{usage, CliResult};

pub const DEFAULT_SEED: u64 = 2025;

#[derive(Parser, Debug)]
#[command(name = "xtree", version, about = "Feature attributions and rankings for tree models")]
struct Cli {
    /// Worker threads for per-instance work; 0 picks the core count.
    #[arg(long, global = true, env = "XTREE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Attribution scores for one instance (JSON) or many (CSV).
    Explain(ExplainArgs),
    /// Feature scores from the projected-ascent ranker.
    Rank(RankArgs),
    /// Insertion and deletion curves per method, averaged over instances.
    Metrics(MetricsArgs),
    /// Error against the exhaustive oracle on synthetic trees of growing depth.
    Stability(StabilityArgs),
    /// Per-call wall time against leaf count on long chains.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// JSON array of N floats, or CSV with one instance per row.
    #[arg(long, alias = "instances")]
    pub instance: PathBuf,
    #[arg(long)]
    pub skip_header: bool,
    /// grad, prob, oracle, linear-treeshap[:fixed|mitigated|wellcond[:capped|depth]], treeshap-k or v1.
    #[arg(long, default_value = "grad")]
    pub algo: String,
    /// banzhaf, wbanzhaf:ν, shapley, beta:α:β or omega:FILE.
    #[arg(long, default_value = "shapley")]
    pub method: String,
    /// Evaluate Beta values for all features in one pass (grad only).
    #[arg(long)]
    pub vectorized: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RankArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub skip_header: bool,
    /// ga or adam.
    #[arg(long, default_value = "ga")]
    pub optimizer: String,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Step size, or `auto` for the largest candidate with a non-decreasing objective.
    #[arg(long, default_value = "5")]
    pub lr: String,
    /// CSV of the objective at the start point and after each iteration.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MetricsArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CSV with one instance per row.
    #[arg(long, alias = "instance")]
    pub instances: PathBuf,
    #[arg(long)]
    pub skip_header: bool,
    /// Comma list of banzhaf, wbanzhaf:ν, shapley, beta:α:β, omega:FILE, ranker:ga|adam:T:ε|auto.
    #[arg(long, default_value = "shapley,banzhaf,ranker:ga:100:5")]
    pub methods: String,
    /// Comma list of Beta candidates for the selected-Beta rows; defaults to
    /// beta:16:1 … beta:1:16 and banzhaf.
    #[arg(long)]
    pub candidates: Option<String>,
    /// Use this many randomly chosen rows instead of all of them.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Averaged curves CSV (method, k, insertion, deletion).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-method means and selected-Beta winners as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Per-instance curves CSV.
    #[arg(long)]
    pub per_instance: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct StabilityArgs {
    /// start:end:step (inclusive) or a comma list.
    #[arg(long, default_value = "10:60:10")]
    pub depths: String,
    #[arg(long, default_value_t = 11)]
    pub features: usize,
    /// chain or random-balanced.
    #[arg(long, default_value = "chain")]
    pub shape: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Trees per depth (seeds seed, seed+1, …); errors are averaged over them.
    #[arg(long, default_value_t = 1)]
    pub repeats: u64,
    /// Comma list of grad, grad-scalar, prob, linear-treeshap[:mode[:capped|depth]], treeshap-k, v1.
    #[arg(long, default_value = "grad,prob,linear-treeshap:fixed,treeshap-k,v1")]
    pub algos: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BenchArgs {
    /// Comma list of leaf counts.
    #[arg(long, default_value = "1000,10000,100000")]
    pub leaves: String,
    #[arg(long, default_value_t = 10)]
    pub features: usize,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Comma list of grad (tree_gradient), shap (vectorized Shapley), prob (TreeProb Shapley).
    #[arg(long, default_value = "grad,shap,prob")]
    pub algos: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("cannot start {n} threads: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads(cli.threads)?;
    match cli.command {
        Command::Explain(a) => commands::explain::run(&a),
        Command::Rank(a) => commands::rank::run(&a),
        Command::Metrics(a) => commands::metrics::run(&a),
        Command::Stability(a) => commands::stability::run(&a),
        Command::Bench(a) => commands::bench::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = usage(e.to_string().trim_end());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.code() as u8)
        }
    }
}

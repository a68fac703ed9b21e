use std::path::PathBuf;
use std::process::ExitCode;

use capfuse_core::Metric;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "capfuse",
    version,
    about = "Choquet-integral fusion of multi-criteria relevance scores"
)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores). Never changes results.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Learn a capacity from judged training queries
    Train(TrainArgs),
    /// Fuse criterion scores into a run file
    Rank(RankArgs),
    /// Score a run against relevance judgments
    Eval(EvalArgs),
    /// Shapley importance and pairwise interaction of a capacity
    Indices(IndicesArgs),
    /// Spearman correlation between two criteria, per query and pooled
    Correlate(CorrelateArgs),
    /// Generate a seeded synthetic feature file and qrels
    Synth(SynthArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum NormalizeArg {
    Minmax,
    None,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum InterpolationArg {
    Contested,
    Extremes,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    qrels: PathBuf,
    /// Target metric for grid tuning: P@k or MAP
    #[arg(long, default_value = "P@30", value_parser = parse_metric)]
    metric: Metric,
    /// Documents per query used to build targets
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 1e-8)]
    ridge: f64,
    /// Project the fitted capacity onto monotone capacities
    #[arg(long)]
    monotone: bool,
    /// Fit singleton and pair coefficients only, starting from uniform weights
    #[arg(long)]
    two_additive: bool,
    #[arg(long, value_enum, default_value_t = InterpolationArg::Contested)]
    interpolation: InterpolationArg,
    #[arg(long, value_enum, default_value_t = NormalizeArg::Minmax)]
    normalize: NormalizeArg,
    /// Fitted capacity file
    #[arg(long)]
    out: PathBuf,
    /// Also write the grid-selected initial capacity here
    #[arg(long)]
    initial_out: Option<PathBuf>,
    /// Also write the training summary here
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum AggregatorArg {
    Choquet,
    Lcs,
    Owa,
    Min,
    Prioritized,
    Mean,
}

#[derive(Args, Debug)]
struct RankArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long, value_enum)]
    aggregator: AggregatorArg,
    /// Capacity file (choquet)
    #[arg(long)]
    capacity: Option<PathBuf>,
    /// Comma-separated weights (lcs, owa)
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Comma-separated criterion names, most important first (prioritized)
    #[arg(long, value_delimiter = ',')]
    priority: Option<Vec<String>>,
    /// Prioritized averaging instead of prioritized scoring
    #[arg(long)]
    averaging: bool,
    /// Run tag; defaults to the aggregator name
    #[arg(long)]
    tag: Option<String>,
    #[arg(long, value_enum, default_value_t = NormalizeArg::Minmax)]
    normalize: NormalizeArg,
    /// Run file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    qrels: PathBuf,
    /// Comma-separated metrics
    #[arg(long, value_delimiter = ',', default_value = "P@5,P@10,P@30,MAP", value_parser = parse_metric)]
    metrics: Vec<Metric>,
    /// Second run for a paired t test on every metric
    #[arg(long)]
    baseline_run: Option<PathBuf>,
    /// Print per-query values as well as means
    #[arg(long)]
    per_query: bool,
    /// Write the table here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IndicesArgs {
    #[arg(long)]
    capacity: PathBuf,
}

#[derive(Args, Debug)]
struct CorrelateArgs {
    #[arg(long)]
    features: PathBuf,
    /// First criterion name
    #[arg(long)]
    a: String,
    /// Second criterion name
    #[arg(long)]
    b: String,
    #[arg(long, value_enum, default_value_t = NormalizeArg::Minmax)]
    normalize: NormalizeArg,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    queries: usize,
    #[arg(long, default_value_t = 100)]
    docs: usize,
    #[arg(long, default_value_t = 2)]
    criteria: usize,
    /// `min`, `sum:w1,w2,...` or `capacity:<path>`
    #[arg(long, default_value = "min")]
    truth: String,
    /// Standard deviation of the Gaussian noise on the true score
    #[arg(long, default_value_t = 0.02)]
    noise: f64,
    /// Fraction of each query's documents judged non-relevant
    #[arg(long, default_value_t = 0.9)]
    quantile: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    qrels: PathBuf,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse::<Metric>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Rank(a) => commands::rank(a),
        Command::Eval(a) => commands::eval(a),
        Command::Indices(a) => commands::indices(a),
        Command::Correlate(a) => commands::correlate(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

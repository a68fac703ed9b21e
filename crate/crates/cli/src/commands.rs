use std::fmt::{self, Write as _};
use std::io::Write as _;
use std::path::Path;

use capfuse_core::data::{
    generate_synthetic, normalize, read_features, read_qrels, read_run, write_features,
    write_qrels, write_run, write_text, NormalizationPolicy, SyntheticConfig, Truth,
};
use capfuse_core::eval::{build_report, compare_reports, percent_change};
use capfuse_core::indices::{interaction_matrix, spearman_correlation};
use capfuse_core::measure::{read_capacity, write_capacity};
use capfuse_core::training::{InterpolationRule, TrainingMode};
use capfuse_core::{
    rank_query, shapley_importance, Aggregator, DataError, JudgedDataset, TrainingConfig,
    TrainingError,
};

use crate::{
    AggregatorArg, CorrelateArgs, EvalArgs, IndicesArgs, InterpolationArg, NormalizeArg, RankArgs,
    SynthArgs, TrainArgs,
};

/// A failed command and its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or combinations.
    Usage(String),
    /// Training had nothing to learn from.
    Degenerate(String),
    /// Unreadable or malformed input, or a failed computation.
    Data(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Data(_) => 1,
            CliError::Usage(_) | CliError::Degenerate(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
            CliError::Degenerate(m) => write!(f, "degenerate training data: {m}"),
        }
    }
}

fn data<E: fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        data(e)
    }
}

impl From<TrainingError> for CliError {
    fn from(e: TrainingError) -> Self {
        match e {
            TrainingError::InvalidStep { .. }
            | TrainingError::InvalidTopK
            | TrainingError::InvalidRidge => CliError::Usage(e.to_string()),
            TrainingError::NoJudgedQueries
            | TrainingError::NoSamples
            | TrainingError::EmptyGrid
            | TrainingError::RankDeficient { .. } => CliError::Degenerate(e.to_string()),
            other => data(other),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn policy(arg: NormalizeArg) -> NormalizationPolicy {
    match arg {
        NormalizeArg::Minmax => NormalizationPolicy::default(),
        NormalizeArg::None => NormalizationPolicy::none(),
    }
}

fn load_features(path: &Path, arg: NormalizeArg) -> Result<JudgedDataset> {
    Ok(normalize(&read_features(path)?, policy(arg))?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(write_text(path, text)?),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(data),
    }
}

pub fn train(args: TrainArgs) -> Result<()> {
    let dataset =
        load_features(&args.features, args.normalize)?.with_judgments(read_qrels(&args.qrels)?);
    let config = TrainingConfig {
        target_metric: args.metric,
        top_k: args.k as usize,
        step: args.step,
        monotone_constraint: args.monotone,
        ridge: args.ridge,
        interpolation: match args.interpolation {
            InterpolationArg::Contested => InterpolationRule::Contested,
            InterpolationArg::Extremes => InterpolationRule::Extremes,
        },
        mode: if args.two_additive {
            TrainingMode::TwoAdditive
        } else {
            TrainingMode::Grid
        },
    };
    let report = capfuse_core::train_pipeline(&dataset, &config)?;
    write_text(&args.out, &write_capacity(&report.fitted))?;
    if let Some(path) = &args.initial_out {
        write_text(path, &write_capacity(&report.initial))?;
    }
    let summary = report.summary();
    if let Some(path) = &args.report {
        write_text(path, &summary)?;
    }
    if !report.skipped_queries.is_empty() {
        eprintln!(
            "warning: {} queries without judgments were skipped",
            report.skipped_queries.len()
        );
    }
    emit(None, &summary)
}

fn aggregator(args: &RankArgs, dataset: &JudgedDataset) -> Result<Aggregator> {
    let criteria = dataset.criteria();
    let weights = || {
        args.weights.clone().ok_or_else(|| {
            CliError::Usage(format!("--weights is required for {:?}", args.aggregator))
        })
    };
    Ok(match args.aggregator {
        AggregatorArg::Choquet => {
            let path = args
                .capacity
                .as_ref()
                .ok_or_else(|| CliError::Usage("--capacity is required for choquet".into()))?;
            let mu = read_capacity(path)?;
            if mu.criteria() != criteria {
                return Err(CliError::Data(format!(
                    "capacity criteria ({}) differ from the feature header ({})",
                    mu.criteria().names().join(","),
                    criteria.names().join(",")
                )));
            }
            Aggregator::Choquet(mu)
        }
        AggregatorArg::Lcs => Aggregator::WeightedSum(weights()?),
        AggregatorArg::Owa => Aggregator::Owa(weights()?),
        AggregatorArg::Min => Aggregator::AndMin,
        AggregatorArg::Mean => Aggregator::Mean,
        AggregatorArg::Prioritized => {
            let names = args
                .priority
                .as_ref()
                .ok_or_else(|| CliError::Usage("--priority is required for prioritized".into()))?;
            let order = names
                .iter()
                .map(|n| {
                    criteria
                        .index_of(n)
                        .ok_or_else(|| CliError::Data(format!("unknown criterion {n:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Aggregator::Prioritized {
                order,
                averaging: args.averaging,
            }
        }
    })
}

pub fn rank(args: RankArgs) -> Result<()> {
    let dataset = load_features(&args.features, args.normalize)?;
    let aggregator = aggregator(&args, &dataset)?;
    aggregator.check(dataset.criteria().len()).map_err(data)?;
    let runs = dataset
        .queries()
        .map(|(_, vectors)| rank_query(vectors, &aggregator))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(data)?;
    let tag = args
        .tag
        .clone()
        .unwrap_or_else(|| aggregator.name().to_string());
    let text = write_run(&runs, &tag).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(args.out.as_deref(), &text)
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let judgments = read_qrels(&args.qrels)?;
    let report = build_report(&read_run(&args.run)?, &judgments, &args.metrics).map_err(data)?;
    for q in &report.unjudged {
        eprintln!("warning: query {q} has no judgments and is excluded");
    }
    let mut out = String::new();
    if args.per_query {
        out.push_str(&report.to_tsv());
    } else {
        out.push_str("query\tmetric\tvalue\n");
        for (m, v) in report.metrics.iter().zip(&report.means) {
            let _ = writeln!(out, "all\t{m}\t{v:.6}");
        }
    }
    if let Some(path) = &args.baseline_run {
        let baseline = build_report(&read_run(path)?, &judgments, &args.metrics).map_err(data)?;
        out.push_str("\nmetric\tsystem\tbaseline\tchange\tt\tdf\n");
        for (i, &m) in report.metrics.iter().enumerate() {
            let (a, b) = (report.means[i], baseline.means[i]);
            let change =
                percent_change(a, b).map_or("NA".to_string(), |c| format!("{:.2}%", 100.0 * c));
            let t = compare_reports(&report, &baseline, m).map_err(data)?;
            let _ = writeln!(out, "{m}\t{a:.6}\t{b:.6}\t{change}\t{:.4}\t{}", t.t, t.df);
        }
    }
    emit(args.out.as_deref(), &out)
}

pub fn indices(args: IndicesArgs) -> Result<()> {
    let mu = read_capacity(&args.capacity)?;
    let names = mu.criteria().names();
    let mut out = String::from("criterion\tshapley\n");
    for (name, v) in names.iter().zip(&shapley_importance(&mu).values) {
        let _ = writeln!(out, "{name}\t{v:.6}");
    }
    let matrix = interaction_matrix(&mu);
    out.push_str("\ninteraction");
    for name in names {
        let _ = write!(out, "\t{name}");
    }
    out.push('\n');
    for (i, name) in names.iter().enumerate() {
        out.push_str(name);
        for j in 0..names.len() {
            if i == j {
                out.push_str("\t-");
            } else {
                let _ = write!(out, "\t{:.6}", matrix.get(i, j));
            }
        }
        out.push('\n');
    }
    if !mu.is_monotone() {
        out.push_str("\nnote\tcapacity is not monotone\n");
    }
    emit(None, &out)
}

pub fn correlate(args: CorrelateArgs) -> Result<()> {
    let dataset = load_features(&args.features, args.normalize)?;
    let find = |name: &str| {
        dataset
            .criteria()
            .index_of(name)
            .ok_or_else(|| CliError::Data(format!("unknown criterion {name:?}")))
    };
    let (a, b) = (find(&args.a)?, find(&args.b)?);
    let rho = |x: &[f64], y: &[f64]| {
        spearman_correlation(x, y).map_or("NA".to_string(), |r| format!("{r:.6}"))
    };
    let mut out = format!("query\tspearman({},{})\n", args.a, args.b);
    let (mut all_x, mut all_y) = (Vec::new(), Vec::new());
    for (q, vectors) in dataset.queries() {
        let x: Vec<f64> = vectors.iter().map(|v| v.scores[a]).collect();
        let y: Vec<f64> = vectors.iter().map(|v| v.scores[b]).collect();
        let _ = writeln!(out, "{q}\t{}", rho(&x, &y));
        all_x.extend(x);
        all_y.extend(y);
    }
    let _ = writeln!(out, "pooled\t{}", rho(&all_x, &all_y));
    emit(None, &out)
}

fn parse_truth(text: &str) -> Result<Truth> {
    if text == "min" {
        return Ok(Truth::Min);
    }
    if let Some(w) = text.strip_prefix("sum:") {
        let weights = w
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage(format!("invalid weights in --truth {text:?}")))?;
        return Ok(Truth::WeightedSum(weights));
    }
    if let Some(path) = text.strip_prefix("capacity:") {
        return Ok(Truth::Choquet(read_capacity(path)?));
    }
    Err(CliError::Usage(format!(
        "invalid --truth {text:?} (expected min, sum:w1,w2,... or capacity:<path>)"
    )))
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let config = SyntheticConfig {
        n_queries: args.queries,
        docs_per_query: args.docs,
        n_criteria: args.criteria,
        truth: parse_truth(&args.truth)?,
        noise: args.noise,
        relevance_quantile: args.quantile,
        seed: args.seed,
    };
    let generated = generate_synthetic(&config).map_err(|e| match e {
        DataError::InvalidParameter(_) | DataError::Measure(_) => CliError::Usage(e.to_string()),
        other => data(other),
    })?;
    write_text(&args.features, &write_features(&generated.dataset))?;
    write_text(&args.qrels, &write_qrels(generated.dataset.judgments()))?;
    emit(
        None,
        &format!(
            "wrote {} queries x {} documents ({} criteria) to {}\n",
            args.queries,
            args.docs,
            args.criteria,
            args.features.display()
        ),
    )
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use capfuse_core::aggregate::{choquet_unchecked, RankedEntry, RankedList};
use capfuse_core::data::{
    generate_synthetic, parse_features, parse_qrels, parse_run, write_run, SyntheticConfig, Truth,
};
use capfuse_core::eval::{average_precision, paired_t_test, precision_at_k};
use capfuse_core::indices::interaction_matrix;
use capfuse_core::measure::{parse_capacity, write_capacity};
use capfuse_core::training::{
    candidate_to_capacity, fit_capacity, generate_grid, mean_metric, TrainingSample,
};
use capfuse_core::{
    choquet_score, interaction_index, shapley_importance, train_pipeline, Capacity, CriterionSet,
    CriterionVector, JudgedDataset, Judgments, Metric, ParseError, TrainingConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

fn random_signed(rng: &mut ChaCha8Rng, n: usize) -> Capacity {
    Capacity::from_fn(CriterionSet::numbered(n).unwrap(), |_| {
        rng.random_range(-1.0..2.0)
    })
    .unwrap()
}

fn random_monotone(rng: &mut ChaCha8Rng, n: usize) -> Capacity {
    let full = (1usize << n) - 1;
    let mut v = vec![0.0; full + 1];
    for mask in 1..full {
        v[mask] = rng.random::<f64>();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                v[mask] = v[mask].max(v[mask & !(1 << i)]);
            }
        }
    }
    v[full] = 1.0;
    Capacity::from_dense(CriterionSet::numbered(n).unwrap(), v).unwrap()
}

fn c1_weighted_mean() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for trial in 0..10_000 {
        let n = 2 + trial % 3;
        let w = random_weights(&mut rng, n);
        let mu = Capacity::from_weights(CriterionSet::numbered(n).unwrap(), &w)
            .map_err(|e| e.to_string())?;
        let x = random_vector(&mut rng, n);
        let mean: f64 = w.iter().zip(&x).map(|(w, x)| w * x).sum();
        worst = worst.max((choquet_score(&x, &mu).unwrap() - mean).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    within(Duration::from_secs(5), start)?;
    Ok(format!("10000 cases, max deviation {worst:.1e}"))
}

fn c2_boundaries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..10_000 {
        let n = 2 + trial % 3;
        let c = CriterionSet::numbered(n).unwrap();
        let x = random_vector(&mut rng, n);
        let max = x.iter().copied().fold(f64::MIN, f64::max);
        let min = x.iter().copied().fold(f64::MAX, f64::min);
        let got_max = choquet_score(&x, &Capacity::maximum(c.clone()).unwrap()).unwrap();
        let got_min = choquet_score(&x, &Capacity::minimum(c).unwrap()).unwrap();
        ensure(got_max == max && got_min == min, || {
            format!("{x:?}: max {got_max} vs {max}, min {got_min} vs {min}")
        })?;
    }
    Ok("10000 vectors, exact".into())
}

fn c3_efficiency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst_sum, mut worst_additive) = (0.0f64, 0.0f64);
    for trial in 0..1000 {
        let n = 2 + trial % 4;
        let mu = if trial % 2 == 0 {
            random_signed(&mut rng, n)
        } else {
            random_monotone(&mut rng, n)
        };
        worst_sum = worst_sum.max((shapley_importance(&mu).total() - 1.0).abs());
        let w = random_weights(&mut rng, n);
        let additive = Capacity::from_weights(CriterionSet::numbered(n).unwrap(), &w).unwrap();
        for (phi, w) in shapley_importance(&additive).values.iter().zip(&w) {
            worst_additive = worst_additive.max((phi - w).abs());
        }
    }
    ensure(worst_sum <= 1e-9, || {
        format!("|sum phi - 1| = {worst_sum:e}")
    })?;
    ensure(worst_additive <= 1e-12, || {
        format!("|phi - w| = {worst_additive:e}")
    })?;
    Ok(format!(
        "sum error {worst_sum:.1e}, additive error {worst_additive:.1e}"
    ))
}

fn c4_learned_capacity() -> Outcome {
    let c = CriterionSet::new(["To", "Re", "Au"]).unwrap();
    let mu = Capacity::from_fn(c, |m| [0.0, 0.705, 0.215, 0.973, 0.025, -0.14, -0.25][m]).unwrap();
    // Shapley weights for N = 3: 1/3 (empty), 1/6 (one other), 1/3 (both others)
    let oracle_phi = [
        0.705 / 3.0 + (0.973 - 0.215) / 6.0 + (-0.14 - 0.025) / 6.0 + (1.0 + 0.25) / 3.0,
        0.215 / 3.0 + (0.973 - 0.705) / 6.0 + (-0.25 - 0.025) / 6.0 + (1.0 + 0.14) / 3.0,
        0.025 / 3.0 + (-0.14 - 0.705) / 6.0 + (-0.25 - 0.215) / 6.0 + (1.0 - 0.973) / 3.0,
    ];
    let oracle_i = ((0.973 - 0.705 - 0.215) + (1.0 + 0.14 + 0.25 + 0.025)) / 2.0;
    let phi = shapley_importance(&mu).values;
    for ((got, oracle), rounded) in phi.iter().zip(oracle_phi).zip([0.7505, 0.4505, -0.2010]) {
        ensure(
            (got - oracle).abs() <= 1e-9 && (got - rounded).abs() <= 1e-9,
            || format!("phi {got} vs oracle {oracle}"),
        )?;
    }
    let i = interaction_index(&mu, 0, 1).unwrap();
    ensure(
        (i - oracle_i).abs() <= 1e-9 && (i - 0.734).abs() <= 1e-9,
        || format!("I(To,Re) = {i}"),
    )?;
    ensure(i > 0.0, || "I(To,Re) is not positive".into())?;
    Ok(format!(
        "phi = ({:.4}, {:.4}, {:.4}), I(To,Re) = {i:.4}",
        phi[0], phi[1], phi[2]
    ))
}

fn c5_grid() -> Outcome {
    let start = Instant::now();
    let two = generate_grid(&CriterionSet::numbered(2).unwrap(), 0.1)
        .unwrap()
        .len();
    let three = generate_grid(&CriterionSet::numbered(3).unwrap(), 0.1)
        .unwrap()
        .len();
    ensure(two == 9 && three == 21, || {
        format!("{two} and {three} candidates")
    })?;
    within(Duration::from_millis(100), start)?;
    Ok("N=2: 9, N=3: 21".into())
}

fn sample(x: Vec<f64>, target: f64) -> TrainingSample {
    TrainingSample {
        vector: CriterionVector::new("q", "d", x),
        target,
    }
}

fn c6_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mu = random_monotone(&mut rng, 3);
    let mut samples = Vec::new();
    let mut orders = std::collections::HashSet::new();
    while samples.len() < 240 || orders.len() < 6 {
        let x = random_vector(&mut rng, 3);
        let mut idx = vec![0, 1, 2];
        idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
        orders.insert(idx);
        let y = choquet_unchecked(&x, &mu);
        samples.push(sample(x, y));
    }
    let start = Instant::now();
    let fit = fit_capacity(&samples, mu.criteria(), &TrainingConfig::default(), None)
        .map_err(|e| e.to_string())?;
    within(Duration::from_secs(1), start)?;
    let err = fit
        .capacity
        .values()
        .iter()
        .zip(mu.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(err <= 1e-6, || format!("max coordinate error {err:e}"))?;
    ensure(fit.rmse <= 1e-9, || format!("rmse {:e}", fit.rmse))?;
    Ok(format!(
        "{} samples, max coordinate error {err:.1e}, rmse {:.1e}",
        samples.len(),
        fit.rmse
    ))
}

const SEED: u64 = 42;
const QUERIES: usize = 50;
const HELD_OUT: usize = 13;

fn synthetic(truth: Truth) -> (JudgedDataset, Vec<f64>) {
    let s = generate_synthetic(&SyntheticConfig {
        n_queries: QUERIES,
        docs_per_query: 100,
        n_criteria: 2,
        truth,
        noise: 0.02,
        relevance_quantile: 0.9,
        seed: SEED,
    })
    .unwrap();
    (s.dataset, s.latent)
}

/// Best held-out score over the weighted-sum grid.
fn best_linear(train: &JudgedDataset, test: &JudgedDataset, metric: Metric) -> f64 {
    let grid = generate_grid(train.criteria(), 0.1).unwrap();
    grid.candidates
        .iter()
        .map(|w| {
            mean_metric(
                test,
                &candidate_to_capacity(train.criteria(), w).unwrap(),
                metric,
            )
            .unwrap()
        })
        .fold(f64::MIN, f64::max)
}

fn rmse(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut sse, mut n) = (0.0, 0usize);
    for (a, b) in pairs {
        sse += (a - b).powi(2);
        n += 1;
    }
    (sse / n as f64).sqrt()
}

/// Ordinary least squares of y on (1, x1, x2) by the 3x3 normal equations.
fn ols_rmse(xs: &[&[f64]], y: &[f64]) -> f64 {
    let mut a = [[0.0f64; 4]; 3];
    for (x, &t) in xs.iter().zip(y) {
        let f = [1.0, x[0], x[1]];
        for r in 0..3 {
            for c in 0..3 {
                a[r][c] += f[r] * f[c];
            }
            a[r][3] += f[r] * t;
        }
    }
    for p in 0..3 {
        let pivot = (p..3)
            .max_by(|&i, &j| a[i][p].abs().total_cmp(&a[j][p].abs()))
            .unwrap();
        a.swap(p, pivot);
        for r in 0..3 {
            if r != p {
                let f = a[r][p] / a[p][p];
                let pivot_row = a[p];
                for (cell, above) in a[r].iter_mut().zip(pivot_row).skip(p) {
                    *cell -= f * above;
                }
            }
        }
    }
    let beta: Vec<f64> = (0..3).map(|r| a[r][3] / a[r][r]).collect();
    rmse(
        xs.iter()
            .zip(y)
            .map(|(x, &t)| (beta[0] + beta[1] * x[0] + beta[2] * x[1], t)),
    )
}

fn c7_interaction_advantage() -> Outcome {
    let start = Instant::now();
    let (data, latent) = synthetic(Truth::Min);
    let (train, test) = data.split_queries(QUERIES - HELD_OUT);
    let metric = Metric::Precision(10);
    let config = TrainingConfig {
        target_metric: metric,
        ..TrainingConfig::default()
    };
    let report = train_pipeline(&train, &config).map_err(|e| e.to_string())?;
    let choquet = mean_metric(&test, &report.fitted, metric).unwrap();
    let linear = best_linear(&train, &test, metric);

    let n_train = train.vectors().len();
    let xs: Vec<&[f64]> = train
        .vectors()
        .iter()
        .map(|v| v.scores.as_slice())
        .collect();
    let y = &latent[..n_train];
    let samples: Vec<TrainingSample> = xs
        .iter()
        .zip(y)
        .map(|(x, &t)| sample(x.to_vec(), t))
        .collect();
    let fit = fit_capacity(&samples, train.criteria(), &config, None).map_err(|e| e.to_string())?;
    let grid = generate_grid(train.criteria(), 0.1).unwrap();
    let grid_rmse = grid
        .candidates
        .iter()
        .map(|w| {
            rmse(
                xs.iter()
                    .zip(y)
                    .map(|(x, &t)| (w[0] * x[0] + w[1] * x[1], t)),
            )
        })
        .fold(f64::MAX, f64::min);
    let linear_rmse = grid_rmse.min(ols_rmse(&xs, y));

    let detail = format!(
        "held-out P@10 choquet {choquet:.4} vs best weighted sum {linear:.4}; fit rmse {:.4} vs best linear {linear_rmse:.4}",
        fit.rmse
    );
    ensure(choquet > linear, || detail.clone())?;
    ensure(fit.rmse <= 0.03, || detail.clone())?;
    ensure(linear_rmse >= 0.05, || detail.clone())?;
    within(Duration::from_secs(30), start)?;
    Ok(detail)
}

fn c8_parity() -> Outcome {
    let (data, _) = synthetic(Truth::WeightedSum(vec![0.7, 0.3]));
    let (train, test) = data.split_queries(QUERIES - HELD_OUT);
    let metric = Metric::Precision(5);
    let config = TrainingConfig {
        target_metric: metric,
        ..TrainingConfig::default()
    };
    let report = train_pipeline(&train, &config).map_err(|e| e.to_string())?;
    let choquet = mean_metric(&test, &report.fitted, metric).unwrap();
    let linear = best_linear(&train, &test, metric);
    let interaction = interaction_matrix(&report.fitted).max_abs();
    let detail = format!("held-out P@5 choquet {choquet:.4} vs best weighted sum {linear:.4}; max |I| {interaction:.4}");
    ensure((choquet - linear).abs() <= 0.02, || detail.clone())?;
    ensure(interaction <= 0.05, || detail.clone())?;
    Ok(detail)
}

fn ranked(q: &str, order: &[usize]) -> RankedList {
    RankedList {
        query_id: q.into(),
        entries: order
            .iter()
            .enumerate()
            .map(|(i, d)| RankedEntry {
                doc_id: format!("d{d}"),
                score: (order.len() - i) as f64,
                rank: i + 1,
            })
            .collect(),
    }
}

fn c9_metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let pool = rng.random_range(1..40usize);
        let grades: Vec<u32> = (0..pool).map(|_| rng.random_range(0..3)).collect();
        let mut order: Vec<usize> = (0..pool).collect();
        for i in (1..pool).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        order.truncate(rng.random_range(0..=pool));
        let mut j = Judgments::new();
        for (d, &g) in grades.iter().enumerate() {
            j.insert("q", &format!("d{d}"), g);
        }
        let r = ranked("q", &order);
        let rel = |d: usize| grades[d] > 0;

        let k = rng.random_range(1..50usize);
        let hits = order.iter().take(k).filter(|&&d| rel(d)).count();
        let p = precision_at_k(&r, &j, k).unwrap();
        ensure((p - hits as f64 / k as f64).abs() <= 1e-12, || {
            format!("P@{k} {p}")
        })?;

        let total = grades.iter().filter(|&&g| g > 0).count();
        let mut sum = 0.0;
        for (pos, &d) in order.iter().enumerate() {
            if rel(d) {
                sum += order[..=pos].iter().filter(|&&e| rel(e)).count() as f64 / (pos + 1) as f64;
            }
        }
        let oracle = if total == 0 { 0.0 } else { sum / total as f64 };
        let ap = average_precision(&r, &j);
        ensure((ap - oracle).abs() <= 1e-12, || {
            format!("AP {ap} vs {oracle}")
        })?;

        let m = rng.random_range(2..30usize);
        let a: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let mean = d.iter().sum::<f64>() / m as f64;
        let sd = (d.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1) as f64).sqrt();
        let t_oracle = mean * (m as f64).sqrt() / sd;
        let t = paired_t_test(&a, &b).unwrap().t;
        ensure(
            (t - t_oracle).abs() <= 1e-12 * (1.0 + t_oracle.abs()),
            || format!("t {t} vs {t_oracle}"),
        )?;
    }
    let mut j = Judgments::new();
    for (d, g) in [(0, 1), (1, 0), (2, 1)] {
        j.insert("q", &format!("d{d}"), g);
    }
    let ap = average_precision(&ranked("q", &[0, 1, 2]), &j);
    ensure((ap - 5.0 / 6.0).abs() <= 1e-12, || format!("hand AP {ap}"))?;
    Ok(format!("1000 instances; hand AP {ap:.4}"))
}

fn parse_by_extension(path: &Path) -> Result<(), ParseError> {
    let text = std::fs::read_to_string(path).unwrap();
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") => parse_features(&text).map(drop),
        Some("qrels") => parse_qrels(&text).map(drop),
        Some("run") => parse_run(&text).map(drop),
        Some("cap") => parse_capacity(&text).map(drop),
        other => panic!("unexpected corpus file type {other:?}"),
    }
}

fn c10_formats() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..100 {
        let n = 1 + trial % 5;
        let mu = random_signed(&mut rng, n);
        let back = parse_capacity(&write_capacity(&mu)).map_err(|e| e.to_string())?;
        ensure(back == mu, || {
            format!("capacity round trip differs for {mu:?}")
        })?;

        let lists: Vec<RankedList> = (0..rng.random_range(1..5))
            .map(|q| {
                let len = rng.random_range(1..30);
                let mut scores: Vec<f64> =
                    (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
                scores.sort_by(|a, b| b.total_cmp(a));
                RankedList {
                    query_id: format!("q{q}"),
                    entries: scores
                        .into_iter()
                        .enumerate()
                        .map(|(i, score)| RankedEntry {
                            doc_id: format!("d{i}"),
                            score,
                            rank: i + 1,
                        })
                        .collect(),
                }
            })
            .collect();
        let parsed = parse_run(&write_run(&lists, "rt").unwrap()).map_err(|e| e.to_string())?;
        ensure(parsed.len() == lists.len(), || "query count changed".into())?;
        for (a, b) in parsed.iter().zip(&lists) {
            ensure(
                a.query_id == b.query_id && a.doc_ids().eq(b.doc_ids()),
                || "order changed".into(),
            )?;
            for (x, y) in a.entries.iter().zip(&b.entries) {
                ensure((x.score - y.score).abs() <= 1e-6, || {
                    format!("score {} vs {}", x.score, y.score)
                })?;
            }
        }
    }

    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/malformed");
    let manifest = std::fs::read_to_string(dir.join("expected.tsv")).unwrap();
    let mut checked = 0;
    for line in manifest.lines().filter(|l| !l.starts_with('#')) {
        let mut fields = line.splitn(3, '\t');
        let (file, want_line, fragment) = (
            fields.next().unwrap(),
            fields.next().unwrap(),
            fields.next().unwrap(),
        );
        let want_line: usize = want_line.parse().unwrap();
        match parse_by_extension(&dir.join(file)) {
            Ok(()) => return Err(format!("{file}: accepted")),
            Err(e) => ensure(e.line == want_line && e.message.contains(fragment), || {
                format!("{file}: got {e}, expected line {want_line}: {fragment}")
            })?,
        }
        checked += 1;
    }
    ensure(checked >= 20, || format!("only {checked} malformed files"))?;
    Ok(format!(
        "100 capacity and run round trips; {checked} malformed files rejected at the expected line"
    ))
}

fn capfuse(dir: &Path, threads: &str, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_capfuse"))
        .current_dir(dir)
        .args(["--threads", threads])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "capfuse {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn pipeline(threads: &str) -> Result<Vec<(String, Vec<u8>)>, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let mut outputs = Vec::new();
    let seed = SEED.to_string();
    let steps: [&[&str]; 4] = [
        &[
            "synth",
            "--seed",
            &seed,
            "--queries",
            "30",
            "--docs",
            "60",
            "--criteria",
            "3",
            "--features",
            "f.tsv",
            "--qrels",
            "q.qrels",
        ],
        &[
            "train",
            "--features",
            "f.tsv",
            "--qrels",
            "q.qrels",
            "--metric",
            "P@10",
            "--k",
            "50",
            "--out",
            "cap.txt",
            "--initial-out",
            "init.txt",
        ],
        &[
            "rank",
            "--features",
            "f.tsv",
            "--aggregator",
            "choquet",
            "--capacity",
            "cap.txt",
            "--out",
            "run.txt",
        ],
        &[
            "eval",
            "--run",
            "run.txt",
            "--qrels",
            "q.qrels",
            "--per-query",
        ],
    ];
    for (i, args) in steps.iter().enumerate() {
        outputs.push((format!("stdout of step {i}"), capfuse(d, threads, args)?));
    }
    for file in ["f.tsv", "q.qrels", "cap.txt", "init.txt", "run.txt"] {
        outputs.push((
            file.to_string(),
            std::fs::read(d.join(file)).map_err(|e| e.to_string())?,
        ));
    }
    Ok(outputs)
}

fn c11_determinism() -> Outcome {
    let first = pipeline("1")?;
    let runs = [pipeline("1")?, pipeline("8")?];
    for other in &runs {
        for ((name, a), (_, b)) in first.iter().zip(other) {
            ensure(a == b, || format!("{name} differs between runs"))?;
        }
    }
    let bytes: usize = first.iter().map(|(_, b)| b.len()).sum();
    Ok(format!("synth, train, rank, eval: {} outputs ({bytes} bytes) identical across 3 runs (threads 1, 1, 8)", first.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("weighted-mean reduction", c1_weighted_mean),
        ("boundary operators", c2_boundaries),
        ("Shapley efficiency", c3_efficiency),
        ("learned-capacity indices", c4_learned_capacity),
        ("grid cardinality", c5_grid),
        ("capacity recovery", c6_recovery),
        ("interaction advantage", c7_interaction_advantage),
        ("near-independence parity", c8_parity),
        ("metric oracles", c9_metric_oracles),
        ("format round trips", c10_formats),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{took:.2?}]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

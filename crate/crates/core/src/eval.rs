//! Precision, average precision, per-query reports and the paired t statistic.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::aggregate::RankedList;
use crate::error::EvalError;

/// Relevance grades keyed by query then document. Grade > 0 means relevant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Judgments {
    grades: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Judgments {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a judgment; returns `false` (and leaves the map unchanged) if
    /// the key is already present.
    pub fn insert(&mut self, query: &str, doc: &str, grade: u32) -> bool {
        let docs = self.grades.entry(query.to_string()).or_default();
        if docs.contains_key(doc) {
            return false;
        }
        docs.insert(doc.to_string(), grade);
        true
    }

    pub fn grade(&self, query: &str, doc: &str) -> Option<u32> {
        self.grades.get(query)?.get(doc).copied()
    }

    pub fn is_relevant(&self, query: &str, doc: &str) -> bool {
        self.grade(query, doc).is_some_and(|g| g > 0)
    }

    pub fn has_query(&self, query: &str) -> bool {
        self.grades.contains_key(query)
    }

    pub fn relevant_count(&self, query: &str) -> usize {
        self.grades
            .get(query)
            .map_or(0, |d| d.values().filter(|&&g| g > 0).count())
    }

    /// Query ids in sorted order.
    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.grades.keys().map(String::as_str)
    }

    /// `(query, doc, grade)` in sorted key order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u32)> {
        self.grades
            .iter()
            .flat_map(|(q, docs)| docs.iter().map(move |(d, g)| (q.as_str(), d.as_str(), *g)))
    }

    pub fn len(&self) -> usize {
        self.grades.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A retrieval metric, written `P@k` or `MAP`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Precision(usize),
    AveragePrecision,
}

impl Metric {
    pub fn evaluate(&self, ranking: &RankedList, judgments: &Judgments) -> f64 {
        match *self {
            Metric::Precision(k) => precision_at(ranking, judgments, k),
            Metric::AveragePrecision => average_precision(ranking, judgments),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Precision(k) => write!(f, "P@{k}"),
            Metric::AveragePrecision => f.write_str("MAP"),
        }
    }
}

impl FromStr for Metric {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "MAP" {
            return Ok(Metric::AveragePrecision);
        }
        s.strip_prefix("P@")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .map(Metric::Precision)
            .ok_or_else(|| EvalError::InvalidMetric(s.to_string()))
    }
}

fn precision_at(ranking: &RankedList, judgments: &Judgments, k: usize) -> f64 {
    let hits = ranking
        .doc_ids()
        .take(k)
        .filter(|d| judgments.is_relevant(&ranking.query_id, d))
        .count();
    hits as f64 / k as f64
}

/// Relevant documents in the first `k` entries divided by `k`, even when the
/// ranking is shorter than `k`.
pub fn precision_at_k(
    ranking: &RankedList,
    judgments: &Judgments,
    k: usize,
) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidCutoff);
    }
    Ok(precision_at(ranking, judgments, k))
}

/// Mean of the precision at each relevant retrieved rank, over all judged
/// relevant documents of the query. 0 when the query has none.
pub fn average_precision(ranking: &RankedList, judgments: &Judgments) -> f64 {
    let total = judgments.relevant_count(&ranking.query_id);
    if total == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, doc) in ranking.doc_ids().enumerate() {
        if judgments.is_relevant(&ranking.query_id, doc) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / total as f64
}

/// Unweighted arithmetic mean.
pub fn mean_over_queries(values: &[f64]) -> Result<f64, EvalError> {
    if values.is_empty() {
        return Err(EvalError::NoQueries);
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Per-query and mean metric values for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub metrics: Vec<Metric>,
    /// `(query, values aligned with metrics)` in run order.
    pub per_query: Vec<(String, Vec<f64>)>,
    pub means: Vec<f64>,
    /// Run queries absent from the judgments (excluded from the means).
    pub unjudged: Vec<String>,
    /// Evaluated queries with no relevant document judged.
    pub no_relevant: Vec<String>,
}

impl MetricReport {
    pub fn query_count(&self) -> usize {
        self.per_query.len()
    }

    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.metrics
            .iter()
            .position(|&m| m == metric)
            .map(|i| self.means[i])
    }

    /// Per-query values of one metric, in report order.
    pub fn column(&self, metric: Metric) -> Option<Vec<(&str, f64)>> {
        let i = self.metrics.iter().position(|&m| m == metric)?;
        Some(
            self.per_query
                .iter()
                .map(|(q, v)| (q.as_str(), v[i]))
                .collect(),
        )
    }

    /// Tab-separated `query<TAB>metric<TAB>value` lines, with `all` rows for the means.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("query\tmetric\tvalue\n");
        for (q, values) in &self.per_query {
            for (m, v) in self.metrics.iter().zip(values) {
                out.push_str(&format!("{q}\t{m}\t{v:.6}\n"));
            }
        }
        for (m, v) in self.metrics.iter().zip(&self.means) {
            out.push_str(&format!("all\t{m}\t{v:.6}\n"));
        }
        out
    }
}

/// Evaluates every judged query of a run.
pub fn build_report(
    runs: &[RankedList],
    judgments: &Judgments,
    metrics: &[Metric],
) -> Result<MetricReport, EvalError> {
    let mut per_query = Vec::new();
    let mut unjudged = Vec::new();
    let mut no_relevant = Vec::new();
    for ranking in runs {
        if !judgments.has_query(&ranking.query_id) {
            unjudged.push(ranking.query_id.clone());
            continue;
        }
        if judgments.relevant_count(&ranking.query_id) == 0 {
            no_relevant.push(ranking.query_id.clone());
        }
        let values: Vec<f64> = metrics
            .iter()
            .map(|m| m.evaluate(ranking, judgments))
            .collect();
        per_query.push((ranking.query_id.clone(), values));
    }
    if per_query.is_empty() {
        return Err(EvalError::NoQueries);
    }
    let means = (0..metrics.len())
        .map(|i| {
            let column: Vec<f64> = per_query.iter().map(|(_, v)| v[i]).collect();
            mean_over_queries(&column)
        })
        .collect::<Result<_, _>>()?;
    Ok(MetricReport {
        metrics: metrics.to_vec(),
        per_query,
        means,
        unjudged,
        no_relevant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
}

/// Paired t statistic of `a - b` using the sample standard deviation.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(EvalError::TooFewPairs(n));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    let t = if sd == 0.0 {
        if mean != 0.0 {
            return Err(EvalError::ZeroVariance);
        }
        0.0
    } else {
        mean / (sd / (n as f64).sqrt())
    };
    Ok(TTest { t, df: n - 1 })
}

/// Paired t test of one metric between two reports over the same queries.
pub fn compare_reports(
    system: &MetricReport,
    baseline: &MetricReport,
    metric: Metric,
) -> Result<TTest, EvalError> {
    let missing = || EvalError::InvalidMetric(metric.to_string());
    let a: BTreeMap<&str, f64> = system
        .column(metric)
        .ok_or_else(missing)?
        .into_iter()
        .collect();
    let b: BTreeMap<&str, f64> = baseline
        .column(metric)
        .ok_or_else(missing)?
        .into_iter()
        .collect();
    if let Some(q) = a
        .keys()
        .find(|q| !b.contains_key(*q))
        .or_else(|| b.keys().find(|q| !a.contains_key(*q)))
    {
        return Err(EvalError::Misaligned(format!(
            "query {q:?} is evaluated in only one run"
        )));
    }
    let xs: Vec<f64> = a.values().copied().collect();
    let ys: Vec<f64> = b.values().copied().collect();
    paired_t_test(&xs, &ys)
}

/// `(a - b) / b`, or `None` when `b` is 0.
pub fn percent_change(a: f64, b: f64) -> Option<f64> {
    (b != 0.0).then(|| (a - b) / b)
}

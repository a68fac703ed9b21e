//! Score fusion operators and per-query ranking.
//!
//! All operators expect scores already mapped to `[0, 1]`; out-of-range inputs
//! are rejected, never clamped.

use std::cmp::Ordering;

use crate::error::AggregateError;
use crate::measure::{validate_weights, Capacity};

/// One document's per-criterion scores for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVector {
    pub query_id: String,
    pub doc_id: String,
    pub scores: Vec<f64>,
}

impl CriterionVector {
    pub fn new(query_id: impl Into<String>, doc_id: impl Into<String>, scores: Vec<f64>) -> Self {
        Self {
            query_id: query_id.into(),
            doc_id: doc_id.into(),
            scores,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub doc_id: String,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

/// A per-query run: entries sorted by score descending, ties by ascending doc id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }
}

/// Fusion operator together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Aggregator {
    Choquet(Capacity),
    /// Linear combination of scores.
    WeightedSum(Vec<f64>),
    /// Ordered weighted average; the first weight applies to the largest score.
    Owa(Vec<f64>),
    /// Prioritized operator over a criterion order (most important first).
    /// `averaging` divides by the sum of the induced weights.
    Prioritized {
        order: Vec<usize>,
        averaging: bool,
    },
    /// Minimum, with ties refined by the remaining sorted scores.
    AndMin,
    Mean,
}

impl Aggregator {
    pub fn name(&self) -> &'static str {
        match self {
            Aggregator::Choquet(_) => "choquet",
            Aggregator::WeightedSum(_) => "lcs",
            Aggregator::Owa(_) => "owa",
            Aggregator::Prioritized {
                averaging: false, ..
            } => "prioritized-scoring",
            Aggregator::Prioritized {
                averaging: true, ..
            } => "prioritized-averaging",
            Aggregator::AndMin => "min",
            Aggregator::Mean => "mean",
        }
    }

    /// Checks that the parameters fit `n` criteria.
    pub fn check(&self, n: usize) -> Result<(), AggregateError> {
        match self {
            Aggregator::Choquet(mu) if mu.n() != n => Err(AggregateError::Arity {
                expected: mu.n(),
                got: n,
            }),
            Aggregator::WeightedSum(w) | Aggregator::Owa(w) => Ok(validate_weights(w, n)?),
            Aggregator::Prioritized { order, .. } => check_permutation(order, n),
            _ => Ok(()),
        }
    }

    /// Fused score of one vector.
    pub fn score(&self, scores: &[f64]) -> Result<f64, AggregateError> {
        match self {
            Aggregator::Choquet(mu) => choquet_score(scores, mu),
            Aggregator::WeightedSum(w) => weighted_sum_score(scores, w),
            Aggregator::Owa(w) => owa_score(scores, w),
            Aggregator::Prioritized { order, averaging } => {
                prioritized_score(scores, order, *averaging)
            }
            Aggregator::AndMin => and_min_score(scores).map(|(s, _)| s),
            Aggregator::Mean => {
                check_scores(scores)?;
                Ok(scores.iter().sum::<f64>() / scores.len() as f64)
            }
        }
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<(), AggregateError> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(AggregateError::InvalidPermutation);
    }
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(AggregateError::InvalidPermutation);
        }
    }
    Ok(())
}

fn check_scores(scores: &[f64]) -> Result<(), AggregateError> {
    for (index, &value) in scores.iter().enumerate() {
        if !value.is_finite() {
            return Err(AggregateError::NonFinite { index });
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(AggregateError::OutOfRange { index, value });
        }
    }
    Ok(())
}

fn check_arity(scores: &[f64], n: usize) -> Result<(), AggregateError> {
    if scores.len() != n {
        return Err(AggregateError::Arity {
            expected: n,
            got: scores.len(),
        });
    }
    check_scores(scores)
}

/// Criterion indices in ascending score order; equal scores keep criterion order.
pub(crate) fn ascending_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    order
}

/// Discrete Choquet integral of `scores` with respect to `mu`.
///
/// With `x_(1) <= ... <= x_(N)` the ascending scores and `A_(i)` the criteria
/// at positions `i..N` of that order, this is
/// `sum_i mu(A_(i)) * (x_(i) - x_(i-1))`, `x_(0) = 0`. It is evaluated in the
/// equivalent form `sum_i x_(i) * (mu(A_(i)) - mu(A_(i+1)))`, which returns the
/// max and min exactly for the boundary capacities.
pub fn choquet_score(scores: &[f64], mu: &Capacity) -> Result<f64, AggregateError> {
    check_arity(scores, mu.n())?;
    Ok(choquet_unchecked(scores, mu))
}

/// [`choquet_score`] without input validation.
pub fn choquet_unchecked(scores: &[f64], mu: &Capacity) -> f64 {
    let mut upper = mu.criteria().full_mask();
    let mut total = 0.0;
    for i in ascending_order(scores) {
        let next = upper & !(1 << i);
        total += scores[i] * (mu.value(upper) - mu.value(next));
        upper = next;
    }
    total
}

pub fn weighted_sum_score(scores: &[f64], weights: &[f64]) -> Result<f64, AggregateError> {
    check_arity(scores, weights.len())?;
    Ok(scores.iter().zip(weights).map(|(x, w)| x * w).sum())
}

pub fn owa_score(scores: &[f64], weights: &[f64]) -> Result<f64, AggregateError> {
    check_arity(scores, weights.len())?;
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted.iter().zip(weights).map(|(x, w)| x * w).sum())
}

/// Prioritized aggregation: the weight of each criterion is the previous
/// weight times the previous criterion's score, starting from 1.
pub fn prioritized_score(
    scores: &[f64],
    order: &[usize],
    averaging: bool,
) -> Result<f64, AggregateError> {
    check_permutation(order, scores.len())?;
    check_scores(scores)?;
    let mut weight = 1.0;
    let mut weighted = 0.0;
    let mut weight_sum = 0.0;
    for &i in order {
        weighted += weight * scores[i];
        weight_sum += weight;
        weight *= scores[i];
    }
    Ok(if averaging {
        weighted / weight_sum
    } else {
        weighted
    })
}

/// Minimum score plus its refinement key: the ascending-sorted scores,
/// compared lexicographically (larger ranks higher).
pub fn and_min_score(scores: &[f64]) -> Result<(f64, Vec<f64>), AggregateError> {
    check_scores(scores)?;
    let mut key = scores.to_vec();
    key.sort_by(|a, b| a.total_cmp(b));
    Ok((key.first().copied().unwrap_or(0.0), key))
}

fn compare_keys(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Scores and orders one query's documents.
///
/// Empty input yields an empty list; vectors from different queries are an error.
pub fn rank_query(
    vectors: &[CriterionVector],
    aggregator: &Aggregator,
) -> Result<RankedList, AggregateError> {
    let Some(first) = vectors.first() else {
        return Ok(RankedList::default());
    };
    if let Some(other) = vectors.iter().find(|v| v.query_id != first.query_id) {
        return Err(AggregateError::MixedQueries {
            first: first.query_id.clone(),
            other: other.query_id.clone(),
        });
    }
    aggregator.check(first.scores.len())?;

    let mut scored = Vec::with_capacity(vectors.len());
    for v in vectors {
        let with_doc = |e: AggregateError| AggregateError::Document {
            doc: v.doc_id.clone(),
            source: Box::new(e),
        };
        if v.scores.len() != first.scores.len() {
            return Err(with_doc(AggregateError::Arity {
                expected: first.scores.len(),
                got: v.scores.len(),
            }));
        }
        let (score, key) = match aggregator {
            Aggregator::AndMin => and_min_score(&v.scores).map_err(with_doc)?,
            other => (other.score(&v.scores).map_err(with_doc)?, Vec::new()),
        };
        scored.push((v.doc_id.as_str(), score, key));
    }
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| compare_keys(&b.2, &a.2))
            .then_with(|| a.0.cmp(b.0))
    });
    Ok(RankedList {
        query_id: first.query_id.clone(),
        entries: scored
            .into_iter()
            .enumerate()
            .map(|(i, (doc, score, _))| RankedEntry {
                doc_id: doc.to_string(),
                score,
                rank: i + 1,
            })
            .collect(),
    })
}

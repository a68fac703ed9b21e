use rayon::prelude::*;

use crate::aggregate::{rank_query, Aggregator};
use crate::data::JudgedDataset;
use crate::error::TrainingError;
use crate::eval::{build_report, Metric};
use crate::measure::{Capacity, CriterionSet};

/// Candidate weight vectors for the initial additive capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningGrid {
    pub step: f64,
    /// Lexicographically ascending.
    pub candidates: Vec<Vec<f64>>,
}

impl TuningGrid {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// Weight vectors that are positive multiples of `step` summing to 1.
///
/// For up to two criteria every such composition is a candidate. From three
/// criteria on, only compositions whose smallest weight equals `step` are
/// kept: one criterion is fixed at the minimum and the others are tuned.
pub fn generate_grid(criteria: &CriterionSet, step: f64) -> Result<TuningGrid, TrainingError> {
    let n = criteria.len();
    let invalid = TrainingError::InvalidStep { step, n };
    if !(step > 0.0 && step <= 1.0) {
        return Err(invalid);
    }
    let units = (1.0 / step).round();
    if (units * step - 1.0).abs() > 1e-9 || (units as usize) < n {
        return Err(invalid);
    }
    let units = units as usize;

    let mut candidates = Vec::new();
    let mut parts = Vec::with_capacity(n);
    compositions(units, n, &mut parts, &mut |parts: &[usize]| {
        if n <= 2 || parts.contains(&1) {
            candidates.push(parts.iter().map(|&k| k as f64 / units as f64).collect());
        }
    });
    if candidates.is_empty() {
        return Err(TrainingError::EmptyGrid);
    }
    Ok(TuningGrid { step, candidates })
}

fn compositions(
    remaining: usize,
    slots: usize,
    parts: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if slots == 1 {
        parts.push(remaining);
        emit(parts);
        parts.pop();
        return;
    }
    for k in 1..=remaining - (slots - 1) {
        parts.push(k);
        compositions(remaining - k, slots - 1, parts, emit);
        parts.pop();
    }
}

/// The additive capacity whose Choquet integral is the weighted mean.
pub fn candidate_to_capacity(
    criteria: &CriterionSet,
    weights: &[f64],
) -> Result<Capacity, TrainingError> {
    Ok(Capacity::from_weights(criteria.clone(), weights)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub best_index: usize,
    pub best_weights: Vec<f64>,
    pub capacity: Capacity,
    /// Mean target metric of each candidate over the training queries.
    pub scores: Vec<f64>,
}

impl TuneResult {
    pub fn best_score(&self) -> f64 {
        self.scores[self.best_index]
    }
}

/// Mean of `metric` over the judged queries of `data` when ranked by the
/// Choquet integral under `mu`.
pub fn mean_metric(
    data: &JudgedDataset,
    mu: &Capacity,
    metric: Metric,
) -> Result<f64, TrainingError> {
    let aggregator = Aggregator::Choquet(mu.clone());
    let runs = data
        .queries()
        .map(|(_, vectors)| rank_query(vectors, &aggregator))
        .collect::<Result<Vec<_>, _>>()?;
    let report = build_report(&runs, data.judgments(), &[metric])?;
    Ok(report.means[0])
}

pub(crate) fn has_judged_relevant(data: &JudgedDataset) -> bool {
    data.queries()
        .any(|(q, _)| data.judgments().relevant_count(q) > 0)
}

/// Scores every candidate and returns the best; ties go to the earliest
/// (lexicographically smallest) candidate.
pub fn tune_select(
    grid: &TuningGrid,
    train: &JudgedDataset,
    metric: Metric,
) -> Result<TuneResult, TrainingError> {
    if grid.is_empty() {
        return Err(TrainingError::EmptyGrid);
    }
    if !has_judged_relevant(train) {
        return Err(TrainingError::NoJudgedQueries);
    }
    let criteria = train.criteria();
    let scores = grid
        .candidates
        .par_iter()
        .map(|w| mean_metric(train, &candidate_to_capacity(criteria, w)?, metric))
        .collect::<Result<Vec<f64>, _>>()?;
    let mut best_index = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best_index] {
            best_index = i;
        }
    }
    let best_weights = grid.candidates[best_index].clone();
    Ok(TuneResult {
        best_index,
        capacity: candidate_to_capacity(criteria, &best_weights)?,
        best_weights,
        scores,
    })
}

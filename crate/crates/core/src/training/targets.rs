use crate::aggregate::{rank_query, Aggregator, CriterionVector};
use crate::data::JudgedDataset;
use crate::error::TrainingError;
use crate::measure::Capacity;

/// A criterion vector with the fused score the fit should reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub vector: CriterionVector,
    pub target: f64,
}

/// How target scores are assigned within a query's top-K list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterpolationRule {
    /// Only misordered documents move: a relevant document scoring below the
    /// best non-relevant one gets the list maximum, and a non-relevant
    /// document scoring above the worst relevant one gets the list minimum.
    /// Everything else keeps its current score.
    #[default]
    Contested,
    /// Every relevant document gets the list maximum and every non-relevant
    /// document the list minimum.
    Extremes,
}

impl std::str::FromStr for InterpolationRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "contested" => Ok(Self::Contested),
            "extremes" => Ok(Self::Extremes),
            other => Err(format!(
                "unknown interpolation rule {other:?} (expected contested or extremes)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TargetSet {
    pub samples: Vec<TrainingSample>,
    /// Queries that contributed no samples (no documents or no judgments).
    pub skipped: Vec<String>,
}

/// Interpolated targets for `scores` given relevance flags.
pub(crate) fn interpolate(scores: &[f64], relevant: &[bool], rule: InterpolationRule) -> Vec<f64> {
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    match rule {
        InterpolationRule::Extremes => relevant.iter().map(|&r| if r { hi } else { lo }).collect(),
        InterpolationRule::Contested => {
            let pick = |want: bool| {
                scores
                    .iter()
                    .zip(relevant)
                    .filter(move |(_, &r)| r == want)
                    .map(|(&s, _)| s)
            };
            let best_non = pick(false).fold(f64::NEG_INFINITY, f64::max);
            let worst_rel = pick(true).fold(f64::INFINITY, f64::min);
            scores
                .iter()
                .zip(relevant)
                .map(|(&s, &r)| match r {
                    true if s < best_non => hi,
                    false if s > worst_rel => lo,
                    _ => s,
                })
                .collect()
        }
    }
}

/// Ranks each query under `mu_star` and turns its top `top_k` documents into
/// training samples. Queries without judgments are skipped.
pub fn build_targets(
    train: &JudgedDataset,
    mu_star: &Capacity,
    top_k: usize,
    rule: InterpolationRule,
) -> Result<TargetSet, TrainingError> {
    if top_k == 0 {
        return Err(TrainingError::InvalidTopK);
    }
    let judgments = train.judgments();
    let aggregator = Aggregator::Choquet(mu_star.clone());
    let mut set = TargetSet::default();
    for (q, vectors) in train.queries() {
        if vectors.is_empty() || !judgments.has_query(q) {
            set.skipped.push(q.to_string());
            continue;
        }
        let ranked = rank_query(vectors, &aggregator)?;
        let top = &ranked.entries[..top_k.min(ranked.len())];
        let scores: Vec<f64> = top.iter().map(|e| e.score).collect();
        let relevant: Vec<bool> = top
            .iter()
            .map(|e| judgments.is_relevant(q, &e.doc_id))
            .collect();
        let targets = interpolate(&scores, &relevant, rule);
        for (entry, target) in top.iter().zip(targets) {
            let vector = vectors
                .iter()
                .find(|v| v.doc_id == entry.doc_id)
                .expect("ranked document comes from this query")
                .clone();
            set.samples.push(TrainingSample { vector, target });
        }
    }
    Ok(set)
}

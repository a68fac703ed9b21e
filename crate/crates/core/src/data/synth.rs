//! Seeded synthetic datasets.
//!
//! The generator is ChaCha8 seeded with `seed_from_u64(seed)`. For each query
//! in order, for each document in order, it draws the N criterion scores
//! uniformly on [0, 1) followed by one standard normal variate scaled by
//! `noise`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::JudgedDataset;
use crate::aggregate::{choquet_unchecked, CriterionVector};
use crate::error::DataError;
use crate::eval::Judgments;
use crate::measure::{validate_weights, Capacity, CriterionSet};

/// The function that produces a document's true score from its criteria.
#[derive(Debug, Clone, PartialEq)]
pub enum Truth {
    WeightedSum(Vec<f64>),
    Min,
    Choquet(Capacity),
}

impl Truth {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Truth::WeightedSum(w) => w.iter().zip(x).map(|(w, x)| w * x).sum(),
            Truth::Min => x.iter().copied().fold(f64::INFINITY, f64::min),
            Truth::Choquet(mu) => choquet_unchecked(x, mu),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n_queries: usize,
    pub docs_per_query: usize,
    pub n_criteria: usize,
    pub truth: Truth,
    pub noise: f64,
    pub relevance_quantile: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub dataset: JudgedDataset,
    /// Noisy true score of each vector, aligned with `dataset.vectors()`.
    pub latent: Vec<f64>,
}

fn check(config: &SyntheticConfig) -> Result<(), DataError> {
    let bad = |m: String| Err(DataError::InvalidParameter(m));
    if config.n_queries == 0 || config.docs_per_query == 0 || config.n_criteria == 0 {
        return bad("query, document and criterion counts must be at least 1".into());
    }
    if !(config.noise >= 0.0 && config.noise.is_finite()) {
        return bad(format!(
            "noise {} must be finite and nonnegative",
            config.noise
        ));
    }
    if !(config.relevance_quantile > 0.0 && config.relevance_quantile < 1.0) {
        return bad(format!(
            "relevance quantile {} must lie in (0, 1)",
            config.relevance_quantile
        ));
    }
    match &config.truth {
        Truth::WeightedSum(w) => validate_weights(w, config.n_criteria)?,
        Truth::Min => {}
        Truth::Choquet(mu) if mu.n() != config.n_criteria => {
            return bad(format!(
                "truth capacity has {} criteria, expected {}",
                mu.n(),
                config.n_criteria
            ))
        }
        Truth::Choquet(_) => {}
    }
    Ok(())
}

/// Generates criteria `c1..cN`, queries `q000..`, documents `d0000..`.
///
/// Within each query the documents whose noisy true score ranks at or above
/// the `relevance_quantile` position (ascending, ties by document order) get
/// grade 1, the rest grade 0. Every document is judged.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<SyntheticDataset, DataError> {
    check(config)?;
    let criteria = CriterionSet::numbered(config.n_criteria)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_docs = config.docs_per_query;
    let cut = (config.relevance_quantile * n_docs as f64).floor() as usize;

    let mut vectors = Vec::with_capacity(config.n_queries * n_docs);
    let mut latent = Vec::with_capacity(config.n_queries * n_docs);
    let mut judgments = Judgments::new();
    for q in 0..config.n_queries {
        let qid = format!("q{q:03}");
        let start = latent.len();
        for d in 0..n_docs {
            let scores: Vec<f64> = (0..config.n_criteria)
                .map(|_| rng.random::<f64>())
                .collect();
            let z: f64 = rng.sample(StandardNormal);
            latent.push(config.truth.eval(&scores) + config.noise * z);
            vectors.push(CriterionVector::new(
                qid.clone(),
                format!("d{d:04}"),
                scores,
            ));
        }
        let ys = &latent[start..];
        let mut order: Vec<usize> = (0..n_docs).collect();
        order.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]).then(a.cmp(&b)));
        let mut grades = vec![0; n_docs];
        for &d in &order[cut..] {
            grades[d] = 1;
        }
        for (d, g) in grades.into_iter().enumerate() {
            judgments.insert(&qid, &format!("d{d:04}"), g);
        }
    }
    let dataset = JudgedDataset::new(criteria, vectors, judgments)?;
    Ok(SyntheticDataset { dataset, latent })
}

use crate::aggregate::CriterionVector;
use crate::error::DataError;

use super::JudgedDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    MinMaxPerQuery,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationPolicy {
    pub kind: Normalization,
    /// Value given to a criterion that is constant within a query.
    pub constant_fill: f64,
}

impl Default for NormalizationPolicy {
    fn default() -> Self {
        Self {
            kind: Normalization::MinMaxPerQuery,
            constant_fill: 0.5,
        }
    }
}

impl NormalizationPolicy {
    pub fn none() -> Self {
        Self {
            kind: Normalization::None,
            ..Self::default()
        }
    }
}

/// Rescales each criterion within each query to [0, 1] by min-max.
///
/// `Normalization::None` only checks that scores are finite; range checks
/// happen at aggregation time.
pub fn normalize(
    dataset: &JudgedDataset,
    policy: NormalizationPolicy,
) -> Result<JudgedDataset, DataError> {
    if !(0.0..=1.0).contains(&policy.constant_fill) {
        return Err(DataError::InvalidParameter(format!(
            "constant fill {} is outside [0, 1]",
            policy.constant_fill
        )));
    }
    for v in dataset.vectors() {
        if v.scores.iter().any(|s| !s.is_finite()) {
            return Err(DataError::NonFinite {
                query: v.query_id.clone(),
                doc: v.doc_id.clone(),
            });
        }
    }
    match policy.kind {
        Normalization::None => Ok(dataset.clone()),
        Normalization::MinMaxPerQuery => {
            let n = dataset.criteria().len();
            dataset.map_scores(|vectors: &[CriterionVector]| {
                let mut lo = vec![f64::INFINITY; n];
                let mut hi = vec![f64::NEG_INFINITY; n];
                for v in vectors {
                    for (c, &s) in v.scores.iter().enumerate() {
                        lo[c] = lo[c].min(s);
                        hi[c] = hi[c].max(s);
                    }
                }
                Ok(vectors
                    .iter()
                    .map(|v| {
                        v.scores
                            .iter()
                            .enumerate()
                            .map(|(c, &s)| {
                                let range = hi[c] - lo[c];
                                if range > 0.0 {
                                    ((s - lo[c]) / range).clamp(0.0, 1.0)
                                } else {
                                    policy.constant_fill
                                }
                            })
                            .collect()
                    })
                    .collect())
            })
        }
    }
}

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use crate::aggregate::CriterionVector;
use crate::error::DataError;
use crate::eval::Judgments;
use crate::measure::CriterionSet;

/// Criterion vectors grouped by query, plus relevance judgments.
///
/// Vectors of one query are stored contiguously; queries keep the order of
/// their first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgedDataset {
    criteria: CriterionSet,
    vectors: Vec<CriterionVector>,
    groups: Vec<(String, Range<usize>)>,
    judgments: Judgments,
}

impl JudgedDataset {
    pub fn new(
        criteria: CriterionSet,
        vectors: Vec<CriterionVector>,
        judgments: Judgments,
    ) -> Result<Self, DataError> {
        let mut seen = HashSet::new();
        for v in &vectors {
            if v.scores.len() != criteria.len() {
                return Err(DataError::InvalidParameter(format!(
                    "({}, {}) has {} scores, expected {}",
                    v.query_id,
                    v.doc_id,
                    v.scores.len(),
                    criteria.len()
                )));
            }
            if !seen.insert((v.query_id.as_str(), v.doc_id.as_str())) {
                return Err(DataError::InvalidParameter(format!(
                    "duplicate document ({}, {})",
                    v.query_id, v.doc_id
                )));
            }
        }

        let mut order: Vec<&str> = Vec::new();
        let mut buckets: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, v) in vectors.iter().enumerate() {
            buckets
                .entry(v.query_id.as_str())
                .or_insert_with(|| {
                    order.push(v.query_id.as_str());
                    Vec::new()
                })
                .push(i);
        }
        let mut grouped = Vec::with_capacity(vectors.len());
        let mut groups = Vec::with_capacity(order.len());
        for q in &order {
            let start = grouped.len();
            grouped.extend(buckets[q].iter().copied());
            groups.push((q.to_string(), start..grouped.len()));
        }
        let mut slots: Vec<Option<CriterionVector>> = vectors.into_iter().map(Some).collect();
        let vectors = grouped
            .into_iter()
            .map(|i| slots[i].take().expect("each index used once"))
            .collect();
        Ok(Self {
            criteria,
            vectors,
            groups,
            judgments,
        })
    }

    pub fn criteria(&self) -> &CriterionSet {
        &self.criteria
    }

    pub fn vectors(&self) -> &[CriterionVector] {
        &self.vectors
    }

    pub fn judgments(&self) -> &Judgments {
        &self.judgments
    }

    pub fn with_judgments(mut self, judgments: Judgments) -> Self {
        self.judgments = judgments;
        self
    }

    pub fn query_count(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `(query id, its vectors)` in dataset order.
    pub fn queries(&self) -> impl Iterator<Item = (&str, &[CriterionVector])> {
        self.groups
            .iter()
            .map(|(q, r)| (q.as_str(), &self.vectors[r.clone()]))
    }

    /// Replaces every score through `f(query index, criterion, old vectors)`;
    /// used by normalization.
    pub(crate) fn map_scores(
        &self,
        mut f: impl FnMut(&[CriterionVector]) -> Result<Vec<Vec<f64>>, DataError>,
    ) -> Result<Self, DataError> {
        let mut out = self.clone();
        for (_, range) in &self.groups {
            let new_scores = f(&self.vectors[range.clone()])?;
            for (v, s) in out.vectors[range.clone()].iter_mut().zip(new_scores) {
                v.scores = s;
            }
        }
        Ok(out)
    }

    /// Splits by query position: the first `n_first` queries, then the rest.
    /// Judgments are copied to both halves.
    pub fn split_queries(&self, n_first: usize) -> (Self, Self) {
        let n_first = n_first.min(self.groups.len());
        let cut = self
            .groups
            .get(n_first)
            .map_or(self.vectors.len(), |(_, r)| r.start);
        let part = |vectors: &[CriterionVector]| {
            Self::new(
                self.criteria.clone(),
                vectors.to_vec(),
                self.judgments.clone(),
            )
            .expect("subset of a valid dataset")
        };
        (part(&self.vectors[..cut]), part(&self.vectors[cut..]))
    }
}

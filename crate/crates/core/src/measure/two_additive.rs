use super::{Capacity, CriterionSet, BOUNDARY_TOL, MAX_DENSE_CRITERIA};
use crate::error::MeasureError;

/// A capacity given by singleton and pair coefficients only.
///
/// `mu(A) = sum_{i in A} singleton(i) + sum_{{i,j} ⊆ A} pair(i, j)`, rescaled so
/// that `mu(all) = 1`. Pairs are stored in upper-triangular order
/// `(0,1), (0,2), ..., (0,N-1), (1,2), ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAdditiveCapacity {
    criteria: CriterionSet,
    singletons: Vec<f64>,
    pairs: Vec<f64>,
}

impl TwoAdditiveCapacity {
    pub fn new(
        criteria: CriterionSet,
        singletons: Vec<f64>,
        pairs: Vec<f64>,
    ) -> Result<Self, MeasureError> {
        let n = criteria.len();
        if singletons.len() != n {
            return Err(MeasureError::WeightCount {
                expected: n,
                got: singletons.len(),
            });
        }
        let n_pairs = n * (n - 1) / 2;
        if pairs.len() != n_pairs {
            return Err(MeasureError::ValueCount {
                expected: n_pairs,
                got: pairs.len(),
            });
        }
        if let Some(index) = singletons.iter().chain(&pairs).position(|v| !v.is_finite()) {
            return Err(MeasureError::NonFiniteWeight { index });
        }
        Ok(Self {
            criteria,
            singletons,
            pairs,
        })
    }

    /// Singletons from `weights`, all pair coefficients zero.
    pub fn additive(criteria: CriterionSet, weights: Vec<f64>) -> Result<Self, MeasureError> {
        let n = criteria.len();
        Self::new(criteria, weights, vec![0.0; n * n.saturating_sub(1) / 2])
    }

    pub fn criteria(&self) -> &CriterionSet {
        &self.criteria
    }

    pub fn singletons(&self) -> &[f64] {
        &self.singletons
    }

    pub fn pairs(&self) -> &[f64] {
        &self.pairs
    }

    /// Position of the pair `{i, j}` in [`Self::pairs`].
    pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(j < n && i != j);
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.pairs[Self::pair_index(self.criteria.len(), i, j)]
    }

    /// Unnormalized set-function value.
    pub fn raw_value(&self, mask: usize) -> f64 {
        let n = self.criteria.len();
        let mut total = 0.0;
        for i in (0..n).filter(|i| mask & (1 << i) != 0) {
            total += self.singletons[i];
            for j in (i + 1..n).filter(|j| mask & (1 << j) != 0) {
                total += self.pair(i, j);
            }
        }
        total
    }

    /// Expands to a dense [`Capacity`], dividing by the full-set total.
    pub fn expand(&self) -> Result<Capacity, MeasureError> {
        let n = self.criteria.len();
        if n > MAX_DENSE_CRITERIA {
            return Err(MeasureError::TooManyCriteria {
                got: n,
                max: MAX_DENSE_CRITERIA,
            });
        }
        let total = self.raw_value(self.criteria.full_mask());
        if total.abs() <= BOUNDARY_TOL {
            return Err(MeasureError::Degenerate);
        }
        Capacity::from_fn(self.criteria.clone(), |mask| self.raw_value(mask) / total)
    }
}

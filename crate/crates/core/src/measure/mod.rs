//! Fuzzy measures (capacities) over a small, ordered set of criteria.
//!
//! Subsets are bitmasks over the criterion order: bit `i` set means criterion
//! `i` belongs to the subset. A [`Capacity`] stores one value per subset in a
//! dense array of length `2^N`, with `mu(empty) = 0` and `mu(all) = 1` pinned.

mod format;
mod two_additive;

pub use format::{parse_capacity, read_capacity, write_capacity, CAPACITY_MAGIC};
pub use two_additive::TwoAdditiveCapacity;

use crate::error::MeasureError;

/// Largest criterion count stored densely (`2^20` values).
pub const MAX_DENSE_CRITERIA: usize = 20;

/// Absolute tolerance for boundary values and weight sums.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Slack allowed when checking `mu(A) <= mu(B)` for `A ⊂ B`.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Exhaustive (all-pairs) violation listing is done up to this size; larger
/// sets report cover pairs `(A, A + i)` only.
const ALL_PAIRS_LIMIT: usize = 12;

/// Ordered, duplicate-free criterion names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CriterionSet {
    names: Vec<String>,
}

impl CriterionSet {
    pub fn new<I, S>(names: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(MeasureError::EmptyCriteria);
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty()
                || name
                    .chars()
                    .any(|c| c.is_whitespace() || c == ',' || c == '+')
            {
                return Err(MeasureError::InvalidName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(MeasureError::DuplicateName(name.clone()));
            }
        }
        Ok(Self { names })
    }

    /// `c1, c2, ..., cN`.
    pub fn numbered(n: usize) -> Result<Self, MeasureError> {
        Self::new((1..=n).map(|i| format!("c{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Mask with every criterion set.
    pub fn full_mask(&self) -> usize {
        (1usize << self.len()) - 1
    }

    /// Builds the bitmask for a list of names.
    pub fn mask_of<S: AsRef<str>>(&self, names: &[S]) -> Result<usize, MeasureError> {
        names.iter().try_fold(0usize, |mask, name| {
            let name = name.as_ref();
            self.index_of(name)
                .map(|i| mask | (1 << i))
                .ok_or_else(|| MeasureError::UnknownCriterion(name.to_string()))
        })
    }

    /// `+`-joined names of a subset in criterion order; `{}` for the empty set.
    pub fn subset_label(&self, mask: usize) -> String {
        if mask == 0 {
            return "{}".to_string();
        }
        self.names
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, n)| n.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// A normalized set function over the subsets of a [`CriterionSet`].
///
/// Values may be negative or non-monotone (a signed game); [`Capacity::is_monotone`]
/// records whether the fuzzy-measure monotonicity condition holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Capacity {
    criteria: CriterionSet,
    values: Vec<f64>,
    monotone: bool,
}

impl Capacity {
    /// Builds a capacity from a dense value array indexed by subset mask.
    ///
    /// `values[0]` and `values[full]` must be 0 and 1 within [`BOUNDARY_TOL`]
    /// and are snapped to those exact values.
    pub fn from_dense(criteria: CriterionSet, mut values: Vec<f64>) -> Result<Self, MeasureError> {
        check_size(&criteria)?;
        let expected = 1usize << criteria.len();
        if values.len() != expected {
            return Err(MeasureError::ValueCount {
                expected,
                got: values.len(),
            });
        }
        if let Some(mask) = values.iter().position(|v| !v.is_finite()) {
            return Err(MeasureError::NonFiniteValue { mask });
        }
        let full = criteria.full_mask();
        if values[0].abs() > BOUNDARY_TOL {
            return Err(MeasureError::Boundary {
                which: "empty",
                expected: 0.0,
                value: values[0],
            });
        }
        if (values[full] - 1.0).abs() > BOUNDARY_TOL {
            return Err(MeasureError::Boundary {
                which: "all",
                expected: 1.0,
                value: values[full],
            });
        }
        values[0] = 0.0;
        values[full] = 1.0;
        let monotone = first_cover_violation(&values, criteria.len()).is_none();
        Ok(Self {
            criteria,
            values,
            monotone,
        })
    }

    /// Builds a capacity from a function of the subset mask. The empty and
    /// full sets are fixed at 0 and 1 regardless of what `f` returns for them.
    pub fn from_fn(
        criteria: CriterionSet,
        mut f: impl FnMut(usize) -> f64,
    ) -> Result<Self, MeasureError> {
        check_size(&criteria)?;
        let full = criteria.full_mask();
        let values = (0..=full)
            .map(|mask| match mask {
                0 => 0.0,
                m if m == full => 1.0,
                m => f(m),
            })
            .collect();
        Self::from_dense(criteria, values)
    }

    /// Additive capacity `mu(A) = sum of weights in A`.
    pub fn from_weights(criteria: CriterionSet, weights: &[f64]) -> Result<Self, MeasureError> {
        check_size(&criteria)?;
        validate_weights(weights, criteria.len())?;
        let full = criteria.full_mask();
        let mut values = vec![0.0; full + 1];
        for mask in 1..=full {
            let low = mask.trailing_zeros() as usize;
            values[mask] = values[mask & (mask - 1)] + weights[low];
        }
        values[full] = 1.0;
        let monotone = first_cover_violation(&values, criteria.len()).is_none();
        Ok(Self {
            criteria,
            values,
            monotone,
        })
    }

    /// `mu(A) = 1` for every nonempty `A`; its Choquet integral is the max.
    pub fn maximum(criteria: CriterionSet) -> Result<Self, MeasureError> {
        Self::from_fn(criteria, |_| 1.0)
    }

    /// `mu(A) = 0` for every proper `A`; its Choquet integral is the min.
    pub fn minimum(criteria: CriterionSet) -> Result<Self, MeasureError> {
        Self::from_fn(criteria, |_| 0.0)
    }

    pub fn criteria(&self) -> &CriterionSet {
        &self.criteria
    }

    pub fn n(&self) -> usize {
        self.criteria.len()
    }

    #[inline]
    pub fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    /// Value of the subset named by `names`.
    pub fn value_of<S: AsRef<str>>(&self, names: &[S]) -> Result<f64, MeasureError> {
        Ok(self.values[self.criteria.mask_of(names)?])
    }

    /// Dense values indexed by subset mask, including the pinned endpoints.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// Checks structure, boundaries and (optionally) monotonicity.
    pub fn validate(&self, require_monotone: bool) -> ValidationReport {
        let entries: Vec<(usize, f64)> = self
            .values
            .iter()
            .enumerate()
            .skip(1)
            .take(self.values.len().saturating_sub(2))
            .map(|(m, &v)| (m, v))
            .collect();
        validate_entries(&self.criteria, &entries, require_monotone)
    }
}

fn check_size(criteria: &CriterionSet) -> Result<(), MeasureError> {
    if criteria.len() > MAX_DENSE_CRITERIA {
        return Err(MeasureError::TooManyCriteria {
            got: criteria.len(),
            max: MAX_DENSE_CRITERIA,
        });
    }
    Ok(())
}

/// Checks that `weights` has length `n`, is finite and nonnegative, and sums
/// to 1 within [`BOUNDARY_TOL`].
pub fn validate_weights(weights: &[f64], n: usize) -> Result<(), MeasureError> {
    if weights.len() != n {
        return Err(MeasureError::WeightCount {
            expected: n,
            got: weights.len(),
        });
    }
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(MeasureError::NonFiniteWeight { index });
        }
        if value < 0.0 {
            return Err(MeasureError::NegativeWeight { index, value });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > BOUNDARY_TOL {
        return Err(MeasureError::WeightSum { sum });
    }
    Ok(())
}

/// First cover pair `(A, A + i)` with `mu(A) > mu(A + i)`, if any.
pub(crate) fn first_cover_violation(values: &[f64], n: usize) -> Option<(usize, usize)> {
    let full = (1usize << n) - 1;
    (0..full).find_map(|mask| {
        (0..n)
            .filter(|i| mask & (1 << i) == 0)
            .map(|i| mask | (1 << i))
            .find(|&sup| values[mask] > values[sup] + MONOTONE_TOL)
            .map(|sup| (mask, sup))
    })
}

/// One problem found by [`validate_entries`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A proper nonempty subset has no value.
    Missing(usize),
    /// A subset was given more than once.
    Duplicate(usize),
    /// An entry names the empty or the full set, or a mask outside the set.
    Boundary(usize),
    NonFinite(usize),
    /// `subset ⊂ superset` but `mu(subset) > mu(superset)`.
    Monotonicity {
        subset: usize,
        superset: usize,
        subset_value: f64,
        superset_value: f64,
    },
}

/// Outcome of a validation pass. Violations are data, not faults.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validates a list of `(mask, value)` entries for the proper nonempty
/// subsets of `criteria`.
///
/// Monotonicity is only checked once the entries are structurally complete.
/// For up to 12 criteria every violating pair `A ⊂ B` is listed; beyond that
/// only cover pairs are.
pub fn validate_entries(
    criteria: &CriterionSet,
    entries: &[(usize, f64)],
    require_monotone: bool,
) -> ValidationReport {
    let n = criteria.len();
    let mut violations = Vec::new();
    if n > MAX_DENSE_CRITERIA {
        violations.push(Violation::Boundary(usize::MAX));
        return ValidationReport { violations };
    }
    let full = criteria.full_mask();
    let mut values: Vec<Option<f64>> = vec![None; full + 1];
    for &(mask, value) in entries {
        if mask == 0 || mask >= full {
            violations.push(Violation::Boundary(mask));
            continue;
        }
        if !value.is_finite() {
            violations.push(Violation::NonFinite(mask));
        }
        if values[mask].is_some() {
            violations.push(Violation::Duplicate(mask));
        } else {
            values[mask] = Some(value);
        }
    }
    for (mask, v) in values.iter().enumerate().take(full).skip(1) {
        if v.is_none() {
            violations.push(Violation::Missing(mask));
        }
    }
    if !violations.is_empty() || !require_monotone {
        return ValidationReport { violations };
    }

    let mut dense: Vec<f64> = values.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    dense[0] = 0.0;
    dense[full] = 1.0;
    let mut push = |subset: usize, superset: usize| {
        if dense[subset] > dense[superset] + MONOTONE_TOL {
            violations.push(Violation::Monotonicity {
                subset,
                superset,
                subset_value: dense[subset],
                superset_value: dense[superset],
            });
        }
    };
    if n <= ALL_PAIRS_LIMIT {
        for superset in 1..=full {
            // proper submasks of `superset`, descending
            let mut sub = (superset - 1) & superset;
            loop {
                push(sub, superset);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & superset;
            }
        }
    } else {
        for subset in 0..full {
            for i in (0..n).filter(|i| subset & (1 << i) == 0) {
                push(subset, subset | (1 << i));
            }
        }
    }
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trc() -> CriterionSet {
        CriterionSet::new(["To", "Re", "Au"]).unwrap()
    }

    fn learned() -> Capacity {
        let c = trc();
        let v = |names: &[&str]| c.mask_of(names).unwrap();
        let entries = [
            (v(&["To"]), 0.705),
            (v(&["Re"]), 0.215),
            (v(&["Au"]), 0.025),
            (v(&["To", "Re"]), 0.973),
            (v(&["To", "Au"]), -0.14),
            (v(&["Re", "Au"]), -0.25),
        ];
        Capacity::from_fn(c.clone(), |m| {
            entries.iter().find(|(mask, _)| *mask == m).unwrap().1
        })
        .unwrap()
    }

    #[test]
    fn criterion_names_are_checked() {
        assert_eq!(
            CriterionSet::new(Vec::<String>::new()),
            Err(MeasureError::EmptyCriteria)
        );
        assert!(matches!(
            CriterionSet::new(["a", "a"]),
            Err(MeasureError::DuplicateName(_))
        ));
        assert!(matches!(
            CriterionSet::new(["a+b"]),
            Err(MeasureError::InvalidName(_))
        ));
        assert!(matches!(
            CriterionSet::new([""]),
            Err(MeasureError::InvalidName(_))
        ));
        let c = trc();
        assert_eq!(c.mask_of(&["Au", "To"]).unwrap(), 0b101);
        assert_eq!(c.subset_label(0b101), "To+Au");
    }

    #[test]
    fn weights_two_equal() {
        let c = CriterionSet::new(["a", "b"]).unwrap();
        let mu = Capacity::from_weights(c, &[0.5, 0.5]).unwrap();
        assert_eq!(mu.value(0b01), 0.5);
        assert_eq!(mu.value(0b10), 0.5);
        assert_eq!(mu.value(0b11), 1.0);
        assert!(mu.is_monotone());
    }

    #[test]
    fn weights_three_pairs() {
        let mu = Capacity::from_weights(trc(), &[0.5, 0.3, 0.2]).unwrap();
        assert!((mu.value_of(&["To", "Re"]).unwrap() - 0.8).abs() < 1e-15);
        assert!((mu.value_of(&["To", "Au"]).unwrap() - 0.7).abs() < 1e-15);
        assert!((mu.value_of(&["Re", "Au"]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weight_errors_are_distinct() {
        let c = CriterionSet::new(["a", "b"]).unwrap();
        assert!(matches!(
            Capacity::from_weights(c.clone(), &[0.6, 0.6]),
            Err(MeasureError::WeightSum { .. })
        ));
        assert!(matches!(
            Capacity::from_weights(c.clone(), &[1.0]),
            Err(MeasureError::WeightCount { .. })
        ));
        assert!(matches!(
            Capacity::from_weights(c, &[1.5, -0.5]),
            Err(MeasureError::NegativeWeight { index: 1, .. })
        ));
    }

    #[test]
    fn too_many_criteria_rejected() {
        let c = CriterionSet::numbered(21).unwrap();
        assert!(matches!(
            Capacity::from_weights(c, &[1.0 / 21.0; 21]),
            Err(MeasureError::TooManyCriteria { .. })
        ));
    }

    #[test]
    fn additive_validates_monotone() {
        let mu = Capacity::from_weights(trc(), &[0.5, 0.3, 0.2]).unwrap();
        assert!(mu.validate(true).is_ok());
    }

    #[test]
    fn learned_capacity_is_not_monotone() {
        let mu = learned();
        assert!(!mu.is_monotone());
        assert!(mu.validate(false).is_ok());
        let report = mu.validate(true);
        let to = mu.criteria().mask_of(&["To"]).unwrap();
        let to_au = mu.criteria().mask_of(&["To", "Au"]).unwrap();
        assert!(report.violations.contains(&Violation::Monotonicity {
            subset: to,
            superset: to_au,
            subset_value: 0.705,
            superset_value: -0.14,
        }));
        // validation is pure
        assert_eq!(mu.validate(true), report);
    }

    #[test]
    fn missing_duplicate_and_boundary_entries() {
        let c = trc();
        let report = validate_entries(&c, &[(1, 0.2), (1, 0.3), (7, 1.0), (2, 0.1)], false);
        assert!(report.violations.contains(&Violation::Duplicate(1)));
        assert!(report.violations.contains(&Violation::Boundary(7)));
        for m in [3, 4, 5, 6] {
            assert!(report.violations.contains(&Violation::Missing(m)));
        }
    }

    #[test]
    fn boundary_values_are_enforced() {
        let c = CriterionSet::new(["a", "b"]).unwrap();
        assert!(matches!(
            Capacity::from_dense(c.clone(), vec![0.0, 0.2, 0.3, 0.9]),
            Err(MeasureError::Boundary { which: "all", .. })
        ));
        assert!(matches!(
            Capacity::from_dense(c, vec![0.0, 0.2, 0.3]),
            Err(MeasureError::ValueCount { .. })
        ));
    }
}

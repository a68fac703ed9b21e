use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{TrainingConfig, TrainingSample};
use crate::aggregate::{ascending_order, choquet_unchecked};
use crate::error::{AggregateError, MeasureError, TrainingError};
use crate::measure::{Capacity, CriterionSet, TwoAdditiveCapacity};

/// Largest criterion count for the dense fit; the normal matrix has
/// `(2^N - 2)^2` entries. Use [`fit_two_additive`] beyond this.
pub const MAX_FIT_CRITERIA: usize = 12;

const RANK_TOL: f64 = 1e-12;
const PROJECTION_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub capacity: Capacity,
    /// Root mean squared difference between fitted Choquet scores and targets.
    pub rmse: f64,
    /// Subset masks no sample constrains; with ridge > 0 they stay at the prior.
    pub unidentified: Vec<usize>,
}

/// Offset and sparse `(column, coefficient)` entries of one sample's row.
/// Column `mask - 1` holds `mu(mask)` for each proper nonempty subset.
fn design_row(x: &[f64], full: usize) -> (f64, Vec<(usize, f64)>) {
    let mut upper = full;
    let mut previous = 0.0;
    let mut offset = 0.0;
    let mut row = Vec::with_capacity(x.len());
    for (pos, i) in ascending_order(x).into_iter().enumerate() {
        let diff = x[i] - previous;
        if pos == 0 {
            offset = diff;
        } else if diff != 0.0 {
            row.push((upper - 1, diff));
        }
        previous = x[i];
        upper &= !(1 << i);
    }
    (offset, row)
}

fn check_samples(samples: &[TrainingSample], n: usize, ridge: f64) -> Result<(), TrainingError> {
    if samples.is_empty() {
        return Err(TrainingError::NoSamples);
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(TrainingError::InvalidRidge);
    }
    for s in samples {
        let scores = &s.vector.scores;
        if scores.len() != n {
            return Err(AggregateError::Arity {
                expected: n,
                got: scores.len(),
            }
            .into());
        }
        if let Some(index) = scores.iter().position(|v| !v.is_finite()) {
            return Err(AggregateError::NonFinite { index }.into());
        }
        if !s.target.is_finite() {
            return Err(AggregateError::NonFinite { index: n }.into());
        }
    }
    Ok(())
}

fn numeric_rank(gram: &DMatrix<f64>) -> usize {
    let eig = SymmetricEigen::new(gram.clone());
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 {
        return 0;
    }
    eig.eigenvalues
        .iter()
        .filter(|&&v| v > RANK_TOL * top)
        .count()
}

/// Solves `(G + ridge I) z = b + ridge prior`, refusing a singular `G` when
/// `ridge` is zero.
fn solve_ridge(
    mut gram: DMatrix<f64>,
    mut rhs: DVector<f64>,
    ridge: f64,
    prior: &[f64],
) -> Result<DVector<f64>, TrainingError> {
    let m = gram.nrows();
    if ridge == 0.0 {
        let rank = numeric_rank(&gram);
        if rank < m {
            return Err(TrainingError::RankDeficient { rank, unknowns: m });
        }
    }
    for a in 0..m {
        gram[(a, a)] += ridge;
        rhs[a] += ridge * prior[a];
    }
    match gram.clone().cholesky() {
        Some(chol) => Ok(chol.solve(&rhs)),
        None => Err(TrainingError::RankDeficient {
            rank: numeric_rank(&gram),
            unknowns: m,
        }),
    }
}

fn rmse(samples: &[TrainingSample], mu: &Capacity) -> f64 {
    let sse: f64 = samples
        .iter()
        .map(|s| (choquet_unchecked(&s.vector.scores, mu) - s.target).powi(2))
        .sum();
    (sse / samples.len() as f64).sqrt()
}

fn finish(
    criteria: &CriterionSet,
    mut values: Vec<f64>,
    samples: &[TrainingSample],
    monotone: bool,
    unidentified: Vec<usize>,
) -> Result<FitResult, TrainingError> {
    if monotone {
        project_monotone(&mut values, criteria.len());
    }
    let capacity = Capacity::from_dense(criteria.clone(), values)?;
    Ok(FitResult {
        rmse: rmse(samples, &capacity),
        capacity,
        unidentified,
    })
}

/// Least-squares fit of every proper nonempty subset value so that the
/// Choquet integral of each sample's vector approximates its target.
///
/// The Choquet integral is linear in the capacity values, so this is an
/// ordinary linear least-squares problem in `2^N - 2` unknowns. Ridge
/// shrinks towards `prior` (default: the uniform additive capacity).
pub fn fit_capacity(
    samples: &[TrainingSample],
    criteria: &CriterionSet,
    config: &TrainingConfig,
    prior: Option<&Capacity>,
) -> Result<FitResult, TrainingError> {
    let n = criteria.len();
    if n > MAX_FIT_CRITERIA {
        return Err(MeasureError::TooManyCriteria {
            got: n,
            max: MAX_FIT_CRITERIA,
        }
        .into());
    }
    check_samples(samples, n, config.ridge)?;
    let uniform;
    let prior = match prior {
        Some(p) if p.criteria() != criteria => return Err(MeasureError::CriteriaMismatch.into()),
        Some(p) => p,
        None => {
            uniform = Capacity::from_weights(criteria.clone(), &vec![1.0 / n as f64; n])?;
            &uniform
        }
    };

    let full = criteria.full_mask();
    let m = full - 1;
    let mut gram = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for s in samples {
        let (offset, row) = design_row(&s.vector.scores, full);
        let r = s.target - offset;
        for &(a, ca) in &row {
            rhs[a] += ca * r;
            for &(c, cc) in &row {
                gram[(a, c)] += ca * cc;
            }
        }
    }
    let unidentified: Vec<usize> = (0..m)
        .filter(|&a| gram[(a, a)] == 0.0)
        .map(|a| a + 1)
        .collect();

    let mut values = vec![0.0; full + 1];
    values[full] = 1.0;
    if m > 0 {
        let z = solve_ridge(gram, rhs, config.ridge, &prior.values()[1..full])?;
        values[1..full].copy_from_slice(z.as_slice());
    }
    finish(
        criteria,
        values,
        samples,
        config.monotone_constraint,
        unidentified,
    )
}

/// Least-squares fit restricted to 2-additive capacities.
///
/// The Choquet integral of a 2-additive capacity is
/// `sum_i m_i x_i + sum_{i<j} m_ij min(x_i, x_j)`, linear in the `N + N(N-1)/2`
/// coefficients, which are constrained to sum to 1. Ridge shrinks towards
/// `prior` (default: uniform singletons, zero pairs).
pub fn fit_two_additive(
    samples: &[TrainingSample],
    criteria: &CriterionSet,
    config: &TrainingConfig,
    prior: Option<&TwoAdditiveCapacity>,
) -> Result<FitResult, TrainingError> {
    let n = criteria.len();
    check_samples(samples, n, config.ridge)?;
    let uniform;
    let prior = match prior {
        Some(p) if p.criteria() != criteria => return Err(MeasureError::CriteriaMismatch.into()),
        Some(p) => p,
        None => {
            uniform = TwoAdditiveCapacity::additive(criteria.clone(), vec![1.0 / n as f64; n])?;
            &uniform
        }
    };
    let n_pairs = n * n.saturating_sub(1) / 2;
    let p = n + n_pairs;
    let features = |x: &[f64]| {
        let mut f = x.to_vec();
        for i in 0..n {
            for j in i + 1..n {
                f.push(x[i].min(x[j]));
            }
        }
        f
    };

    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    for s in samples {
        let f = features(&s.vector.scores);
        for a in 0..p {
            rhs[a] += f[a] * s.target;
            for c in 0..p {
                gram[(a, c)] += f[a] * f[c];
            }
        }
    }
    let mut unidentified = Vec::new();
    let mut k = n;
    for i in 0..n {
        if gram[(i, i)] == 0.0 {
            unidentified.push(1 << i);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if gram[(k, k)] == 0.0 {
                unidentified.push((1 << i) | (1 << j));
            }
            k += 1;
        }
    }
    unidentified.sort_unstable();

    if config.ridge == 0.0 {
        let rank = numeric_rank(&gram);
        if rank < p {
            return Err(TrainingError::RankDeficient { rank, unknowns: p });
        }
    }
    let prior_coeffs: Vec<f64> = prior
        .singletons()
        .iter()
        .chain(prior.pairs())
        .copied()
        .collect();
    let mut kkt = DMatrix::<f64>::zeros(p + 1, p + 1);
    let mut kkt_rhs = DVector::<f64>::zeros(p + 1);
    for a in 0..p {
        for c in 0..p {
            kkt[(a, c)] = gram[(a, c)];
        }
        kkt[(a, a)] += config.ridge;
        kkt[(a, p)] = 1.0;
        kkt[(p, a)] = 1.0;
        kkt_rhs[a] = rhs[a] + config.ridge * prior_coeffs[a];
    }
    kkt_rhs[p] = 1.0;
    let z = kkt
        .lu()
        .solve(&kkt_rhs)
        .ok_or(TrainingError::RankDeficient {
            rank: numeric_rank(&gram),
            unknowns: p,
        })?;
    let fitted = TwoAdditiveCapacity::new(
        criteria.clone(),
        z.as_slice()[..n].to_vec(),
        z.as_slice()[n..p].to_vec(),
    )?;
    let dense = fitted.expand()?;
    finish(
        criteria,
        dense.values().to_vec(),
        samples,
        config.monotone_constraint,
        unidentified,
    )
}

/// Makes a dense capacity value array monotone in place.
///
/// Violating cover pairs `(A, A + i)` are repeatedly replaced by their
/// average (only the free coordinate moves when the other is the empty or
/// full set) until no violation exceeds 1e-9. The values are then clamped to
/// [0, 1] and raised bottom-up to the maximum of their subsets, which makes
/// the result exactly monotone.
pub fn project_monotone(values: &mut [f64], n: usize) {
    let full = (1usize << n) - 1;
    for _ in 0..MAX_SWEEPS {
        let mut worst = 0.0f64;
        for mask in 0..full {
            for i in 0..n {
                let sup = mask | (1 << i);
                if sup == mask {
                    continue;
                }
                let gap = values[mask] - values[sup];
                if gap <= 0.0 {
                    continue;
                }
                worst = worst.max(gap);
                if mask == 0 {
                    values[sup] = values[0];
                } else if sup == full {
                    values[mask] = values[full];
                } else {
                    let mid = 0.5 * (values[mask] + values[sup]);
                    values[mask] = mid;
                    values[sup] = mid;
                }
            }
        }
        if worst <= PROJECTION_TOL {
            break;
        }
    }
    for v in &mut values[1..full] {
        *v = v.clamp(0.0, 1.0);
    }
    for mask in 1..full {
        for i in 0..n {
            if mask & (1 << i) != 0 {
                values[mask] = values[mask].max(values[mask & !(1 << i)]);
            }
        }
    }
}

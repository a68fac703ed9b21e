//! Importance (Shapley) and pairwise interaction indices of a capacity, and
//! Spearman rank correlation between criterion score lists.

use crate::error::IndexError;
use crate::measure::Capacity;

/// Shapley importance per criterion, in criterion order.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceProfile {
    pub values: Vec<f64>,
}

impl ImportanceProfile {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Symmetric pairwise interaction indices; the diagonal is unused (0).
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    n: usize,
    values: Vec<f64>,
}

impl InteractionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// `(i, j, value)` for every `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn max_abs(&self) -> f64 {
        self.pairs().map(|(_, _, v)| v.abs()).fold(0.0, f64::max)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `phi(i) = sum over Cr ⊆ C \ {i} of (N-|Cr|-1)! |Cr|! / N! * (mu(Cr + i) - mu(Cr))`.
pub fn shapley_importance(mu: &Capacity) -> ImportanceProfile {
    let n = mu.n();
    // (N-s-1)! s! / N! = 1 / (N * C(N-1, s))
    let weight: Vec<f64> = (0..n)
        .map(|s| 1.0 / (n as f64 * binomial(n - 1, s)))
        .collect();
    let values = (0..n)
        .map(|i| {
            let bit = 1usize << i;
            (0..=mu.criteria().full_mask())
                .filter(|m| m & bit == 0)
                .map(|m| weight[m.count_ones() as usize] * (mu.value(m | bit) - mu.value(m)))
                .sum()
        })
        .collect();
    ImportanceProfile { values }
}

/// Pairwise interaction of criteria `i` and `j`:
/// `sum over Cr ⊆ C \ {i,j} of (N-|Cr|-2)! |Cr|! / (N-1)! * Δ_ij mu(Cr)` with
/// `Δ_ij mu(Cr) = mu(Cr+i+j) - mu(Cr+i) - mu(Cr+j) + mu(Cr)`.
pub fn interaction_index(mu: &Capacity, i: usize, j: usize) -> Result<f64, IndexError> {
    let n = mu.n();
    for k in [i, j] {
        if k >= n {
            return Err(IndexError::OutOfRange(k));
        }
    }
    if i == j {
        return Err(IndexError::SameCriterion);
    }
    Ok(interaction_unchecked(mu, i, j))
}

fn interaction_unchecked(mu: &Capacity, i: usize, j: usize) -> f64 {
    let n = mu.n();
    let (bi, bj) = (1usize << i, 1usize << j);
    // (N-s-2)! s! / (N-1)! = 1 / ((N-1) * C(N-2, s))
    let weight: Vec<f64> = (0..n - 1)
        .map(|s| 1.0 / ((n - 1) as f64 * binomial(n - 2, s)))
        .collect();
    (0..=mu.criteria().full_mask())
        .filter(|m| m & (bi | bj) == 0)
        .map(|m| {
            let delta = mu.value(m | bi | bj) - mu.value(m | bi) - mu.value(m | bj) + mu.value(m);
            weight[m.count_ones() as usize] * delta
        })
        .sum()
}

/// All pairwise interactions. Empty (0×0 usable entries) when `N = 1`.
pub fn interaction_matrix(mu: &Capacity) -> InteractionMatrix {
    let n = mu.n();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = interaction_unchecked(mu, i, j);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    InteractionMatrix { n, values }
}

/// 1-based average ranks (ties share the mean of their positions).
pub fn fractional_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman's rho as the Pearson correlation of average ranks.
pub fn spearman_correlation(x: &[f64], y: &[f64]) -> Result<f64, IndexError> {
    if x.len() != y.len() {
        return Err(IndexError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(IndexError::TooShort(x.len()));
    }
    let rx = fractional_ranks(x);
    let ry = fractional_ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(IndexError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

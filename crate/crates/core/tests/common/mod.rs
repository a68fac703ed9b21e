#![allow(dead_code)]

use capfuse_core::{Capacity, CriterionSet};
use proptest::prelude::*;

pub fn criteria(n: usize) -> CriterionSet {
    CriterionSet::numbered(n).unwrap()
}

/// Weights on the simplex.
pub fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("all zero", |raw| {
        let total: f64 = raw.iter().sum();
        (total > 1e-6).then(|| {
            let mut w: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let rest: f64 = w[..w.len() - 1].iter().sum();
            let last = w.len() - 1;
            w[last] = (1.0 - rest).max(0.0);
            w
        })
    })
}

pub fn scores(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, n)
}

/// Arbitrary signed capacity: proper subsets anywhere in [-1, 2].
pub fn signed_capacity(n: usize) -> impl Strategy<Value = Capacity> {
    prop::collection::vec(-1.0f64..2.0, (1 << n) - 2)
        .prop_map(move |v| Capacity::from_fn(criteria(n), |m| v[m - 1]).unwrap())
}

/// Monotone capacity built bottom-up as running maxima of uniform draws.
pub fn monotone_capacity(n: usize) -> impl Strategy<Value = Capacity> {
    prop::collection::vec(0.0f64..1.0, (1 << n) - 2).prop_map(move |u| monotone_from(n, &u))
}

pub fn monotone_from(n: usize, u: &[f64]) -> Capacity {
    let full = (1usize << n) - 1;
    let mut v = vec![0.0; full + 1];
    for mask in 1..full {
        v[mask] = u[mask - 1];
        for i in 0..n {
            if mask & (1 << i) != 0 {
                v[mask] = v[mask].max(v[mask & !(1 << i)]);
            }
        }
    }
    v[full] = 1.0;
    Capacity::from_dense(criteria(n), v).unwrap()
}

/// Choquet integral by the textbook sum over the sorted permutation,
/// written independently of the library's implementation.
pub fn choquet_oracle(x: &[f64], mu: &Capacity) -> f64 {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap().then(a.cmp(&b)));
    let mut total = 0.0;
    for k in 0..n {
        let upper: usize = idx[k..].iter().map(|&i| 1usize << i).sum();
        let below = if k == 0 { 0.0 } else { x[idx[k - 1]] };
        total += (x[idx[k]] - below) * mu.value(upper);
    }
    total
}

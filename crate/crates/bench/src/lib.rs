//! Fixtures shared by the benchmarks.

use capfuse_core::aggregate::{choquet_unchecked, CriterionVector};
use capfuse_core::data::{generate_synthetic, SyntheticConfig, Truth};
use capfuse_core::training::TrainingSample;
use capfuse_core::{Capacity, CriterionSet, JudgedDataset};

/// Deterministic pseudo-random values in [0, 1) (SplitMix64).
pub struct Stream(u64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// A signed capacity with arbitrary proper-subset values.
pub fn signed_capacity(n: usize, seed: u64) -> Capacity {
    let mut s = Stream::new(seed);
    Capacity::from_fn(CriterionSet::numbered(n).unwrap(), |_| {
        2.0 * s.next_f64() - 0.5
    })
    .unwrap()
}

pub fn vectors(n: usize, count: usize, seed: u64) -> Vec<CriterionVector> {
    let mut s = Stream::new(seed);
    (0..count)
        .map(|i| CriterionVector::new("q", format!("d{i}"), (0..n).map(|_| s.next_f64()).collect()))
        .collect()
}

/// Samples whose targets are the Choquet integral under `mu`.
pub fn samples(mu: &Capacity, count: usize, seed: u64) -> Vec<TrainingSample> {
    vectors(mu.n(), count, seed)
        .into_iter()
        .map(|v| {
            let target = choquet_unchecked(&v.scores, mu);
            TrainingSample { vector: v, target }
        })
        .collect()
}

pub fn judged(n_queries: usize, docs: usize, n_criteria: usize) -> JudgedDataset {
    generate_synthetic(&SyntheticConfig {
        n_queries,
        docs_per_query: docs,
        n_criteria,
        truth: Truth::Min,
        noise: 0.02,
        relevance_quantile: 0.9,
        seed: 42,
    })
    .unwrap()
    .dataset
}

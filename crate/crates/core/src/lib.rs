//! Multi-criteria relevance fusion with the discrete Choquet integral.
//!
//! Scores from several relevance criteria are fused under a capacity (a set
//! function on criterion subsets) learned from judged queries. The crate also
//! provides classical baselines (weighted sum, OWA, prioritized scoring, min),
//! Shapley importance and interaction indices, IR metrics, and the text
//! formats used by the `capfuse` command-line tool.

pub mod aggregate;
pub mod data;
pub mod error;
pub mod eval;
pub mod indices;
pub mod measure;
pub mod training;

pub use aggregate::{
    choquet_score, rank_query, Aggregator, CriterionVector, RankedEntry, RankedList,
};
pub use data::JudgedDataset;
pub use error::{
    AggregateError, DataError, EvalError, IndexError, MeasureError, ParseError, TrainingError,
};
pub use eval::{Judgments, Metric, MetricReport};
pub use indices::{interaction_index, shapley_importance, ImportanceProfile, InteractionMatrix};
pub use measure::{Capacity, CriterionSet, TwoAdditiveCapacity};
pub use training::{train_pipeline, TrainingConfig, TrainingReport};

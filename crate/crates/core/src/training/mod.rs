//! Capacity learning: grid tuning of an additive start point, interpolated
//! targets over the top-K documents, and a least-squares fit of all subset
//! values.

mod fit;
mod grid;
mod pipeline;
mod targets;

pub use fit::{fit_capacity, fit_two_additive, project_monotone, FitResult};
pub use grid::{
    candidate_to_capacity, generate_grid, mean_metric, tune_select, TuneResult, TuningGrid,
};
pub use pipeline::{train_pipeline, TrainingConfig, TrainingMode, TrainingReport};
pub use targets::{build_targets, InterpolationRule, TargetSet, TrainingSample};

use std::fmt::Write as _;

use super::fit::{fit_capacity, fit_two_additive};
use super::grid::{generate_grid, has_judged_relevant, mean_metric, tune_select, TuningGrid};
use super::targets::{build_targets, InterpolationRule};
use crate::data::JudgedDataset;
use crate::error::TrainingError;
use crate::eval::Metric;
use crate::indices::{
    interaction_matrix, shapley_importance, ImportanceProfile, InteractionMatrix,
};
use crate::measure::{Capacity, TwoAdditiveCapacity};

/// How the starting capacity and the fitted family are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrainingMode {
    /// Grid-tuned additive start, then a fit of every subset value.
    #[default]
    Grid,
    /// Uniform additive start, then a fit of singleton and pair coefficients.
    TwoAdditive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub target_metric: Metric,
    pub top_k: usize,
    pub step: f64,
    pub monotone_constraint: bool,
    pub ridge: f64,
    pub interpolation: InterpolationRule,
    pub mode: TrainingMode,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            target_metric: Metric::Precision(30),
            top_k: 100,
            step: 0.1,
            monotone_constraint: false,
            ridge: 1e-8,
            interpolation: InterpolationRule::Contested,
            mode: TrainingMode::Grid,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), TrainingError> {
        if self.top_k == 0 {
            return Err(TrainingError::InvalidTopK);
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(TrainingError::InvalidRidge);
        }
        if !(self.step > 0.0 && self.step <= 0.5) {
            return Err(TrainingError::InvalidStep {
                step: self.step,
                n: 0,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub config: TrainingConfig,
    /// `None` in two-additive mode.
    pub grid: Option<TuningGrid>,
    pub candidate_scores: Vec<f64>,
    pub initial_weights: Vec<f64>,
    pub initial: Capacity,
    /// Target metric of the initial capacity on the training data.
    pub initial_score: f64,
    pub fitted: Capacity,
    /// Target metric of the fitted capacity on the training data.
    pub fitted_score: f64,
    pub rmse: f64,
    pub samples: usize,
    pub unidentified: Vec<usize>,
    pub skipped_queries: Vec<String>,
    pub shapley: ImportanceProfile,
    pub interactions: InteractionMatrix,
}

impl TrainingReport {
    /// Plain-text summary.
    pub fn summary(&self) -> String {
        let criteria = self.fitted.criteria();
        let join = |w: &[f64]| {
            w.iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let metric = self.config.target_metric;
        let mut out = String::new();
        let _ = writeln!(out, "metric\t{metric}");
        if let Some(grid) = &self.grid {
            let _ = writeln!(out, "grid\t{} candidates, step {}", grid.len(), grid.step);
            for (w, s) in grid.candidates.iter().zip(&self.candidate_scores) {
                let _ = writeln!(out, "  {}\t{s:.6}", join(w));
            }
        }
        let _ = writeln!(
            out,
            "initial\t{}\t{metric} {:.6}",
            join(&self.initial_weights),
            self.initial_score
        );
        let _ = writeln!(out, "samples\t{}", self.samples);
        if !self.skipped_queries.is_empty() {
            let _ = writeln!(out, "skipped\t{}", self.skipped_queries.join(","));
        }
        let _ = writeln!(out, "rmse\t{:.6}", self.rmse);
        let _ = writeln!(out, "fitted\t{metric} {:.6}", self.fitted_score);
        for mask in subsets_by_size(criteria.len()) {
            let _ = writeln!(
                out,
                "  {}\t{:.6}",
                criteria.subset_label(mask),
                self.fitted.value(mask)
            );
        }
        if !self.fitted.is_monotone() {
            let _ = writeln!(out, "note\tfitted capacity is not monotone");
        }
        if !self.unidentified.is_empty() {
            let labels: Vec<String> = self
                .unidentified
                .iter()
                .map(|&m| criteria.subset_label(m))
                .collect();
            let _ = writeln!(out, "unidentified\t{}", labels.join(","));
        }
        let _ = writeln!(out, "shapley");
        for (i, v) in self.shapley.values.iter().enumerate() {
            let _ = writeln!(out, "  {}\t{v:.6}", criteria.name(i));
        }
        let _ = writeln!(out, "interaction");
        for (i, j, v) in self.interactions.pairs() {
            let _ = writeln!(out, "  {}\t{}\t{v:.6}", criteria.name(i), criteria.name(j));
        }
        out
    }
}

/// Proper nonempty subsets ordered by size, then mask.
fn subsets_by_size(n: usize) -> Vec<usize> {
    let full = (1usize << n) - 1;
    let mut masks: Vec<usize> = (1..full).collect();
    masks.sort_by_key(|&m| (m.count_ones(), m));
    masks
}

/// Grid tuning (or the uniform start in two-additive mode), target
/// interpolation over the top-K lists, then the least-squares fit.
pub fn train_pipeline(
    train: &JudgedDataset,
    config: &TrainingConfig,
) -> Result<TrainingReport, TrainingError> {
    config.validate()?;
    if !has_judged_relevant(train) {
        return Err(TrainingError::NoJudgedQueries);
    }
    let criteria = train.criteria();
    let n = criteria.len();
    let metric = config.target_metric;

    let (grid, candidate_scores, initial_weights, initial, initial_score) = match config.mode {
        TrainingMode::Grid => {
            let grid = generate_grid(criteria, config.step)?;
            let tuned = tune_select(&grid, train, metric)?;
            let score = tuned.best_score();
            (
                Some(grid),
                tuned.scores,
                tuned.best_weights,
                tuned.capacity,
                score,
            )
        }
        TrainingMode::TwoAdditive => {
            let weights = vec![1.0 / n as f64; n];
            let mu = Capacity::from_weights(criteria.clone(), &weights)?;
            let score = mean_metric(train, &mu, metric)?;
            (None, Vec::new(), weights, mu, score)
        }
    };

    let targets = build_targets(train, &initial, config.top_k, config.interpolation)?;
    let fit = match config.mode {
        TrainingMode::Grid => fit_capacity(&targets.samples, criteria, config, Some(&initial))?,
        TrainingMode::TwoAdditive => {
            let prior = TwoAdditiveCapacity::additive(criteria.clone(), initial_weights.clone())?;
            fit_two_additive(&targets.samples, criteria, config, Some(&prior))?
        }
    };
    let fitted_score = mean_metric(train, &fit.capacity, metric)?;
    Ok(TrainingReport {
        config: config.clone(),
        grid,
        candidate_scores,
        initial_weights,
        initial,
        initial_score,
        shapley: shapley_importance(&fit.capacity),
        interactions: interaction_matrix(&fit.capacity),
        fitted: fit.capacity,
        fitted_score,
        rmse: fit.rmse,
        samples: targets.samples.len(),
        unidentified: fit.unidentified,
        skipped_queries: targets.skipped,
    })
}

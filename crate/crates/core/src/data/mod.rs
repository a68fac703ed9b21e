//! Datasets, text formats, per-query normalization and synthetic generation.

mod dataset;
mod features;
mod normalize;
mod qrels;
mod run;
mod synth;

pub use dataset::JudgedDataset;
pub use features::{parse_features, read_features, write_features};
pub use normalize::{normalize, Normalization, NormalizationPolicy};
pub use qrels::{parse_qrels, read_qrels, write_qrels};
pub use run::{parse_run, read_run, write_run, RUN_SCORE_DECIMALS};
pub use synth::{generate_synthetic, SyntheticConfig, SyntheticDataset, Truth};

use std::path::Path;

use crate::error::DataError;

pub(crate) fn read_text(path: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `text` to `path`.
pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<(), DataError> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

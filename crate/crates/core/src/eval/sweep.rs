use serde::{Deserialize, Serialize};

use super::{cross_validate, EvalError, EvaluationReport};
use crate::dataset::{corrupt_salt_pepper, DatasetError, LabeledDataset};
use crate::solver::{Method, SolverConfig};
use crate::Scalar;

/// Accuracy-versus-dimension table for one method; `m` runs over `dims`.
pub fn dimension_sweep<T: Scalar>(
    data: &LabeledDataset<T>,
    method: Method,
    dims: impl IntoIterator<Item = usize>,
    k_folds: usize,
    cv_seed: u64,
    config: &SolverConfig,
) -> Result<Vec<EvaluationReport>, EvalError> {
    dims.into_iter()
        .map(|m| cross_validate(data, method, m, k_folds, cv_seed, config))
        .collect()
}

/// Salt-and-pepper robustness grid: the first `k` classes are corrupted for
/// every `k` in `classes`, at each sample fraction, once per seed.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionGrid {
    /// Inclusive range of corrupted-class counts.
    pub classes: (usize, usize),
    pub sample_fractions: Vec<f64>,
    pub pixel_fraction: f64,
    /// Corruption seeds `0..seeds`.
    pub seeds: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionRow {
    pub method: Method,
    pub m: usize,
    pub corrupted_classes: usize,
    pub sample_fraction: f64,
    pub pixel_fraction: f64,
    /// Mean cross-validated accuracy per corruption seed.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Clean-data accuracy minus `mean`.
    pub degradation: f64,
}

pub fn corruption_sweep<T: Scalar>(
    data: &LabeledDataset<T>,
    method: Method,
    m: usize,
    grid: &CorruptionGrid,
    k_folds: usize,
    cv_seed: u64,
    config: &SolverConfig,
) -> Result<Vec<CorruptionRow>, EvalError> {
    if grid.classes.1 > data.class_count() {
        return Err(DatasetError::UnknownClass(grid.classes.1 - 1).into());
    }
    let clean = cross_validate(data, method, m, k_folds, cv_seed, config)?.mean_accuracy;
    let mut rows = Vec::new();
    for k in grid.classes.0..=grid.classes.1 {
        let targets: Vec<usize> = (0..k).collect();
        for &fraction in &grid.sample_fractions {
            let mut accuracies = Vec::with_capacity(grid.seeds as usize);
            for seed in 0..grid.seeds {
                let corrupted = corrupt_salt_pepper(data, &targets, fraction, grid.pixel_fraction, seed)?;
                accuracies.push(cross_validate(&corrupted, method, m, k_folds, cv_seed, config)?.mean_accuracy);
            }
            let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
            rows.push(CorruptionRow {
                method,
                m,
                corrupted_classes: k,
                sample_fraction: fraction,
                pixel_fraction: grid.pixel_fraction,
                accuracies,
                mean,
                degradation: clean - mean,
            });
        }
    }
    Ok(rows)
}

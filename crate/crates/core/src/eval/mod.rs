//! Evaluation protocol: 1-NN in the projected space, stratified k-fold
//! accuracy, minimum pairwise projected class distance and plot data.

mod knn;
mod plot;
mod sweep;

pub use knn::{accuracy, knn_classify};
pub use sweep::{corruption_sweep, dimension_sweep, CorruptionGrid, CorruptionRow};
pub use plot::{export_projection_plot, histogram, histogram_csv, scatter_csv, HistogramBin, PlotFiles, DEFAULT_BINS};

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{fit_flda_pairwise, fit_lda_eig};
use crate::dataset::{stratified_folds, DatasetError, Fold, LabeledDataset};
use crate::scatter::{class_statistics, ClassStatistics, ScatterError};
use crate::solver::{self, pair_distances, project_dataset, Method, Projection, SolverConfig, SolverError, SolverTrace};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("training set is empty")]
    EmptyTraining,
    #[error("k = {k} is invalid for {n_train} training points")]
    InvalidK { k: usize, n_train: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("minimum pairwise distance needs at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("plot export supports m = 1 or 2, got {0}")]
    UnsupportedPlotDim(usize),
    #[error("i/o error: {0}")]
    Io(#[source] std::io::Error),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl EvalError {
    pub fn is_numerical(&self) -> bool {
        match self {
            EvalError::Solver(SolverError::SvdFailure) => true,
            EvalError::Solver(SolverError::Scatter(e)) => !matches!(e, ScatterError::InvalidEpsilon(_)),
            _ => false,
        }
    }
}

/// Cross-validated accuracy of one method at one projected dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: Method,
    #[serde(rename = "m")]
    pub projected_dim: usize,
    #[serde(rename = "folds")]
    pub per_fold_accuracy: Vec<f64>,
    #[serde(rename = "mean")]
    pub mean_accuracy: f64,
    /// Population standard deviation over folds.
    #[serde(rename = "std")]
    pub std_accuracy: f64,
    pub min_pairwise_distance: f64,
    /// Wall time of each fold's fit, in seconds.
    pub wall_time_s: Vec<f64>,
}

/// Fits `method` with the dimension and seed taken from `config`.
pub fn fit_method<T: Scalar>(
    data: &LabeledDataset<T>,
    method: Method,
    config: &SolverConfig,
) -> Result<(Projection<T>, Option<SolverTrace>), SolverError> {
    match method {
        Method::Swrlda => solver::fit(data, config).map(|(p, t)| (p, Some(t))),
        Method::LdaEig => {
            config.validate(data.dim())?;
            fit_lda_eig(data, config.target_dim, config.epsilon_policy).map(|p| (p, None))
        }
        Method::Flda => {
            config.validate(data.dim())?;
            fit_flda_pairwise(data, config.target_dim, config.epsilon_policy).map(|p| (p, None))
        }
    }
}

/// `min_{i<j} ‖Wᵀ(x̄_i − x̄_j)‖₂`.
pub fn min_pairwise_distance<T: Scalar>(w: &DMatrix<T>, stats: &ClassStatistics<T>) -> Result<f64, EvalError> {
    if stats.class_count() < 2 {
        return Err(EvalError::TooFewClasses(stats.class_count()));
    }
    if w.nrows() != stats.dim() {
        return Err(EvalError::Shape(format!("W has {} rows, data has {} features", w.nrows(), stats.dim())));
    }
    Ok(pair_distances(w, stats).iter().map(|p| p.distance).fold(f64::INFINITY, f64::min))
}

/// Minimum pairwise distance of full-data fits averaged over seeds `0..runs`.
pub fn average_min_pairwise_distance<T: Scalar>(
    data: &LabeledDataset<T>,
    method: Method,
    config: &SolverConfig,
    runs: usize,
) -> Result<f64, EvalError> {
    let stats = class_statistics(data);
    let mut total = 0.0;
    for seed in 0..runs as u64 {
        let (proj, _) = fit_method(data, method, &SolverConfig { seed, ..config.clone() })?;
        total += min_pairwise_distance(&proj.matrix, &stats)?;
    }
    Ok(total / runs.max(1) as f64)
}

fn mean_and_population_std(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
    (mean, var.sqrt())
}

/// Accuracy on one split: fit on `train`, 1-NN classify `test`.
///
/// Classes absent from the training rows are dropped before fitting, so
/// their test rows are simply misclassified.
pub fn evaluate_fold<T: Scalar>(
    data: &LabeledDataset<T>,
    fold: &Fold,
    method: Method,
    config: &SolverConfig,
) -> Result<(f64, f64), EvalError> {
    let (train, original) = data.subset(&fold.train)?;
    let started = Instant::now();
    let (proj, _) = fit_method(&train, method, config)?;
    let elapsed = started.elapsed().as_secs_f64();
    let train_points = project_dataset(&train, &proj.matrix)?;
    let train_labels: Vec<usize> = train.labels().iter().map(|&l| original[l]).collect();
    let test_points = proj.matrix.tr_mul(&data.features().select_columns(&fold.test));
    let truth: Vec<usize> = fold.test.iter().map(|&j| data.labels()[j]).collect();
    let predicted = knn_classify(&train_points, &train_labels, &test_points, 1)?;
    Ok((accuracy(&predicted, &truth), elapsed))
}

/// Cross-validation over explicit folds.
pub fn cross_validate_with_folds<T: Scalar>(
    data: &LabeledDataset<T>,
    folds: &[Fold],
    method: Method,
    config: &SolverConfig,
) -> Result<EvaluationReport, EvalError> {
    let mut per_fold_accuracy = Vec::with_capacity(folds.len());
    let mut wall_time_s = Vec::with_capacity(folds.len());
    for fold in folds {
        let (acc, secs) = evaluate_fold(data, fold, method, config)?;
        per_fold_accuracy.push(acc);
        wall_time_s.push(secs);
    }
    let (mean_accuracy, std_accuracy) = mean_and_population_std(&per_fold_accuracy);
    let (full, _) = fit_method(data, method, config)?;
    let min_pairwise_distance = min_pairwise_distance(&full.matrix, &class_statistics(data))?;
    Ok(EvaluationReport {
        method,
        projected_dim: config.target_dim,
        per_fold_accuracy,
        mean_accuracy,
        std_accuracy,
        min_pairwise_distance,
        wall_time_s,
    })
}

/// Stratified `k_folds`-fold cross-validated 1-NN accuracy of `method` at
/// projected dimension `m`; fold assignment uses `seed`, fitting uses
/// `config.seed`.
pub fn cross_validate<T: Scalar>(
    data: &LabeledDataset<T>,
    method: Method,
    m: usize,
    k_folds: usize,
    seed: u64,
    config: &SolverConfig,
) -> Result<EvaluationReport, EvalError> {
    let folds = stratified_folds(data, k_folds, seed)?;
    cross_validate_with_folds(data, &folds, method, &SolverConfig { target_dim: m, ..config.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synthesize, GaussianSpec};

    #[test]
    fn min_distance_cases() {
        let stats = ClassStatistics::from_means(DMatrix::from_row_slice(1, 3, &[0.0, 1.0, 5.0]), vec![1, 1, 1]);
        assert_eq!(min_pairwise_distance(&DMatrix::from_element(1, 1, 1.0), &stats).unwrap(), 1.0);
        let same = ClassStatistics::from_means(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]), vec![1, 1]);
        assert_eq!(min_pairwise_distance(&DMatrix::identity(2, 1), &same).unwrap(), 0.0);
        let one = ClassStatistics::from_means(DMatrix::from_element(1, 1, 0.0), vec![3]);
        assert!(matches!(
            min_pairwise_distance(&DMatrix::from_element(1, 1, 1.0), &one),
            Err(EvalError::TooFewClasses(1))
        ));
    }

    #[test]
    fn population_std() {
        let (m, s) = mean_and_population_std(&[1.0, 0.0]);
        assert_eq!((m, s), (0.5, 0.5));
    }

    #[test]
    fn report_is_deterministic() {
        let data: LabeledDataset<f64> = synthesize(&GaussianSpec::syn1(4)).unwrap();
        let config = SolverConfig::default();
        let mut a = cross_validate(&data, Method::Swrlda, 1, 5, 1, &config).unwrap();
        let mut b = cross_validate(&data, Method::Swrlda, 1, 5, 1, &config).unwrap();
        a.wall_time_s.clear();
        b.wall_time_s.clear();
        assert_eq!(a, b);
        assert!(a.mean_accuracy >= *a.per_fold_accuracy.iter().min_by(|x, y| x.total_cmp(y)).unwrap());
        assert!(a.std_accuracy >= 0.0);
    }
}

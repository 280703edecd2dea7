//! Labeled datasets: construction, CSV ingestion, synthetic generators,
//! salt-and-pepper corruption and stratified fold assignment.
//!
//! Features are stored column-per-sample (`d × n`); on disk every sample is
//! one CSV row.

mod corrupt;
mod folds;
mod io;
mod synth;

pub use corrupt::corrupt_salt_pepper;
pub use folds::{stratified_folds, Fold};
pub use io::{load_csv, read_sidecar, write_csv, write_sidecar, LabelColumn, Sidecar};
pub use synth::{synthesize, GaussianSpec};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("empty file: no data rows")]
    Empty,
    #[error("ragged row {row}: expected {expected} columns, found {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("non-numeric feature at row {row}, column {column}: {value:?}")]
    NonNumeric { row: usize, column: usize, value: String },
    #[error("non-finite feature at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("single class: at least two classes are required")]
    SingleClass,
    #[error("label column {0} not found")]
    UnknownLabelColumn(String),
    #[error("label {label} at sample {sample} is outside 0..{class_count}")]
    LabelOutOfRange { sample: usize, label: usize, class_count: usize },
    #[error("class {0} does not exist")]
    UnknownClass(usize),
    #[error("class {0} has no samples")]
    EmptyClass(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("covariance matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("invalid gaussian spec: {0}")]
    InvalidSpec(String),
    #[error("fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
    #[error("class {class} has {size} samples, fewer than the {k} folds requested")]
    ClassTooSmall { class: usize, size: usize, k: usize },
    #[error("fold count must be at least 1")]
    ZeroFolds,
}

/// A `d × n` feature matrix with dense class labels `0..c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T: Scalar> {
    features: DMatrix<T>,
    labels: Vec<usize>,
    class_count: usize,
    label_names: Vec<String>,
}

impl<T: Scalar> LabeledDataset<T> {
    /// Validates and builds a dataset; class names default to `"0"`, `"1"`, ….
    pub fn new(features: DMatrix<T>, labels: Vec<usize>, class_count: usize) -> Result<Self, DatasetError> {
        let names = (0..class_count).map(|i| i.to_string()).collect();
        Self::with_label_names(features, labels, class_count, names)
    }

    pub fn with_label_names(
        features: DMatrix<T>,
        labels: Vec<usize>,
        class_count: usize,
        label_names: Vec<String>,
    ) -> Result<Self, DatasetError> {
        let (d, n) = features.shape();
        if d == 0 || n == 0 {
            return Err(DatasetError::Empty);
        }
        if labels.len() != n {
            return Err(DatasetError::Shape(format!("{} labels for {} samples", labels.len(), n)));
        }
        if label_names.len() != class_count {
            return Err(DatasetError::Shape(format!(
                "{} label names for {} classes",
                label_names.len(),
                class_count
            )));
        }
        if class_count < 2 {
            return Err(DatasetError::SingleClass);
        }
        let mut seen = vec![false; class_count];
        for (sample, &label) in labels.iter().enumerate() {
            if label >= class_count {
                return Err(DatasetError::LabelOutOfRange { sample, label, class_count });
            }
            seen[label] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(DatasetError::EmptyClass(missing));
        }
        for (idx, v) in features.iter().enumerate() {
            if !v.is_finite() {
                return Err(DatasetError::NonFinite { row: idx / d + 1, column: idx % d + 1 });
            }
        }
        Ok(Self { features, labels, class_count, label_names })
    }

    pub fn features(&self) -> &DMatrix<T> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Original label strings, indexed by dense label.
    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn dim(&self) -> usize {
        self.features.nrows()
    }

    pub fn len(&self) -> usize {
        self.features.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-class sample counts `n_i`.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Sample indices grouped by class.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.class_count];
        for (j, &l) in self.labels.iter().enumerate() {
            groups[l].push(j);
        }
        groups
    }

    /// Samples at `indices`, with the classes present re-densified in
    /// ascending original order.
    ///
    /// Returns the subset and, for each of its dense labels, the original
    /// label it came from.
    pub fn subset(&self, indices: &[usize]) -> Result<(Self, Vec<usize>), DatasetError> {
        let mut present = vec![false; self.class_count];
        for &j in indices {
            present[self.labels[j]] = true;
        }
        let original: Vec<usize> = (0..self.class_count).filter(|&c| present[c]).collect();
        let mut remap = vec![usize::MAX; self.class_count];
        for (dense, &orig) in original.iter().enumerate() {
            remap[orig] = dense;
        }
        let features = self.features.select_columns(indices);
        let labels = indices.iter().map(|&j| remap[self.labels[j]]).collect();
        let names = original.iter().map(|&c| self.label_names[c].clone()).collect();
        let subset = Self::with_label_names(features, labels, original.len(), names)?;
        Ok((subset, original))
    }

    /// Same samples with the feature matrix replaced.
    pub fn with_features(&self, features: DMatrix<T>) -> Result<Self, DatasetError> {
        if features.shape() != self.features.shape() {
            return Err(DatasetError::Shape("replacement features differ in shape".into()));
        }
        Self::with_label_names(features, self.labels.clone(), self.class_count, self.label_names.clone())
    }

    /// Same features with new labels (names reset to their indices).
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<Self, DatasetError> {
        Self::new(self.features.clone(), labels, self.class_count)
    }
}

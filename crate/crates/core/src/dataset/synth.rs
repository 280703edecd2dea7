use nalgebra::{Cholesky, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{DatasetError, LabeledDataset};
use crate::Scalar;

/// Parameters of a homoscedastic Gaussian class mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    /// One mean vector per class.
    pub means: Vec<Vec<f64>>,
    /// Shared covariance, as rows.
    pub covariance: Vec<Vec<f64>>,
    pub samples_per_class: usize,
    pub seed: u64,
}

const SYN_MEANS: [[f64; 2]; 4] = [[-5.0, -4.0], [-3.0, 1.0], [-1.0, 6.0], [10.0, -2.0]];

impl GaussianSpec {
    fn planar(classes: usize, seed: u64) -> Self {
        Self {
            means: SYN_MEANS[..classes].iter().map(|m| m.to_vec()).collect(),
            covariance: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            samples_per_class: 200,
            seed,
        }
    }

    /// Three nearby planar classes, 200 samples each, identity covariance.
    pub fn syn1(seed: u64) -> Self {
        Self::planar(3, seed)
    }

    /// `syn1` plus a far-away edge class centred at (10, −2).
    pub fn syn2(seed: u64) -> Self {
        Self::planar(4, seed)
    }

    pub fn dim(&self) -> usize {
        self.covariance.len()
    }

    fn covariance_matrix<T: Scalar>(&self) -> Result<DMatrix<T>, DatasetError> {
        let d = self.dim();
        if d == 0 {
            return Err(DatasetError::InvalidSpec("empty covariance".into()));
        }
        if self.covariance.iter().any(|row| row.len() != d) {
            return Err(DatasetError::InvalidSpec("covariance is not square".into()));
        }
        let scale = self.covariance.iter().flatten().fold(1.0f64, |acc, v| acc.max(v.abs()));
        for i in 0..d {
            for j in 0..i {
                if (self.covariance[i][j] - self.covariance[j][i]).abs() > 1e-12 * scale {
                    return Err(DatasetError::InvalidSpec(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(DMatrix::from_fn(d, d, |i, j| T::cast(self.covariance[i][j])))
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.samples_per_class == 0 {
            return Err(DatasetError::InvalidSpec("samples_per_class must be positive".into()));
        }
        if self.means.len() < 2 {
            return Err(DatasetError::SingleClass);
        }
        let d = self.dim();
        if let Some(i) = self.means.iter().position(|m| m.len() != d) {
            return Err(DatasetError::InvalidSpec(format!("mean {i} has wrong dimension")));
        }
        if self.means.iter().flatten().chain(self.covariance.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(DatasetError::InvalidSpec("non-finite entry".into()));
        }
        Ok(())
    }
}

/// Draws `samples_per_class` points per class from `N(mean_i, Σ)` as
/// `mean_i + L z` with `Σ = L Lᵀ` and `z` standard normal.
///
/// Samples are grouped by class; the output is a pure function of the spec.
pub fn synthesize<T: Scalar>(spec: &GaussianSpec) -> Result<LabeledDataset<T>, DatasetError> {
    spec.validate()?;
    let cov = spec.covariance_matrix::<T>()?;
    let chol = Cholesky::new(cov).ok_or(DatasetError::NotPositiveDefinite)?;
    let lower = chol.l();
    let d = spec.dim();
    let c = spec.means.len();
    let per = spec.samples_per_class;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut features = DMatrix::<T>::zeros(d, c * per);
    let mut labels = Vec::with_capacity(c * per);
    for (class, mean) in spec.means.iter().enumerate() {
        let mean = DVector::from_iterator(d, mean.iter().map(|&v| T::cast(v)));
        for s in 0..per {
            let z = DVector::from_fn(d, |_, _| {
                let v: f64 = StandardNormal.sample(&mut rng);
                T::cast(v)
            });
            let x = &mean + &lower * z;
            features.set_column(class * per + s, &x);
            labels.push(class);
        }
    }
    LabeledDataset::new(features, labels, c)
}

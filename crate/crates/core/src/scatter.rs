//! Class statistics, scatter matrices and the regularized inverse square
//! root of the within-class scatter.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LabeledDataset;
use crate::linalg::{asymmetry, sorted_symmetric_eigen, symmetrize};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum ScatterError {
    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("regularized scatter is singular: eigenvalue {0:.3e} after shift")]
    Singular(f64),
    #[error("symmetric eigendecomposition did not converge")]
    EigenFailure,
    #[error("invalid regularization: {0}")]
    InvalidEpsilon(f64),
}

/// Per-class means and counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStatistics<T: Scalar> {
    /// `d × c`; column `i` is the mean of class `i`.
    pub means: DMatrix<T>,
    pub counts: Vec<usize>,
    pub total: usize,
    pub total_mean: DVector<T>,
}

impl<T: Scalar> ClassStatistics<T> {
    /// Builds statistics directly from class means and counts.
    pub fn from_means(means: DMatrix<T>, counts: Vec<usize>) -> Self {
        assert_eq!(means.ncols(), counts.len(), "one count per class mean");
        let total: usize = counts.iter().sum();
        let n = T::from_usize(total).expect("count fits scalar");
        let mut total_mean = DVector::zeros(means.nrows());
        for (i, &ni) in counts.iter().enumerate() {
            total_mean.axpy(T::from_usize(ni).expect("count fits scalar") / n, &means.column(i), T::one());
        }
        Self { means, counts, total, total_mean }
    }

    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    pub fn dim(&self) -> usize {
        self.means.nrows()
    }

    /// Pair weight `n_i n_j / n²` of one unordered pair.
    pub fn pair_weight(&self, i: usize, j: usize) -> T {
        let n = T::from_usize(self.total).expect("count fits scalar");
        T::from_usize(self.counts[i] * self.counts[j]).expect("count fits scalar") / (n * n)
    }

    /// Difference of two class means `x̄_i − x̄_j`.
    pub fn mean_difference(&self, i: usize, j: usize) -> DVector<T> {
        self.means.column(i) - self.means.column(j)
    }
}

pub fn class_statistics<T: Scalar>(data: &LabeledDataset<T>) -> ClassStatistics<T> {
    let groups = data.class_indices();
    let d = data.dim();
    let mut means = DMatrix::zeros(d, groups.len());
    for (i, idx) in groups.iter().enumerate() {
        means.set_column(i, &crate::linalg::column_mean(data.features(), idx));
    }
    ClassStatistics::from_means(means, groups.iter().map(Vec::len).collect())
}

/// `S_w = Σ_i Σ_{j ∈ class i} (x_j − x̄_i)(x_j − x̄_i)ᵀ`, unnormalized.
pub fn within_scatter<T: Scalar>(data: &LabeledDataset<T>, stats: &ClassStatistics<T>) -> DMatrix<T> {
    let mut centered = data.features().clone();
    for (j, &label) in data.labels().iter().enumerate() {
        let mut col = centered.column_mut(j);
        col -= stats.means.column(label);
    }
    let mut sw = &centered * centered.transpose();
    symmetrize(&mut sw);
    sw
}

/// `S_b = Σ_i (n_i/n)(x̄_i − x̄)(x̄_i − x̄)ᵀ`.
pub fn between_scatter_total_mean<T: Scalar>(stats: &ClassStatistics<T>) -> DMatrix<T> {
    let d = stats.dim();
    let n = T::from_usize(stats.total).expect("count fits scalar");
    let mut sb = DMatrix::zeros(d, d);
    for (i, &ni) in stats.counts.iter().enumerate() {
        let dev = stats.means.column(i) - &stats.total_mean;
        sb.ger(T::from_usize(ni).expect("count fits scalar") / n, &dev, &dev, T::one());
    }
    symmetrize(&mut sb);
    sb
}

/// `S_b = Σ_{i<j} (n_i n_j/n²)(x̄_i − x̄_j)(x̄_i − x̄_j)ᵀ`; needs no total mean.
pub fn between_scatter_pairwise<T: Scalar>(stats: &ClassStatistics<T>) -> DMatrix<T> {
    let d = stats.dim();
    let c = stats.class_count();
    let mut sb = DMatrix::zeros(d, d);
    for i in 0..c {
        for j in (i + 1)..c {
            let diff = stats.mean_difference(i, j);
            sb.ger(stats.pair_weight(i, j), &diff, &diff, T::one());
        }
    }
    symmetrize(&mut sb);
    sb
}

/// How the ridge `ε` added to `S_w` before inversion is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonPolicy {
    /// Fixed `ε` (may be zero for a well-conditioned `S_w`).
    Absolute(f64),
    /// `ε = factor · trace(S_w)/d`, floored at `1e-12`.
    RelativeToTrace(f64),
}

impl Default for EpsilonPolicy {
    fn default() -> Self {
        EpsilonPolicy::RelativeToTrace(1e-6)
    }
}

pub const EPSILON_FLOOR: f64 = 1e-12;

impl EpsilonPolicy {
    pub fn resolve<T: Scalar>(&self, within: &DMatrix<T>) -> Result<f64, ScatterError> {
        match *self {
            EpsilonPolicy::Absolute(eps) if eps >= 0.0 && eps.is_finite() => Ok(eps),
            EpsilonPolicy::RelativeToTrace(f) if f >= 0.0 && f.is_finite() => {
                let trace = within.trace().as_f64();
                Ok((f * trace / within.nrows() as f64).max(EPSILON_FLOOR))
            }
            EpsilonPolicy::Absolute(bad) | EpsilonPolicy::RelativeToTrace(bad) => {
                Err(ScatterError::InvalidEpsilon(bad))
            }
        }
    }
}

/// `S_w` together with `S_w′ = (S_w + εI)^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPair<T: Scalar> {
    pub within: DMatrix<T>,
    pub within_inv_sqrt: DMatrix<T>,
    pub epsilon: T,
    /// Eigenvalues of `S_w` that were below `ε` before the shift.
    pub dropped_rank: usize,
}

impl<T: Scalar> ScatterPair<T> {
    /// `S_w + εI`, the metric the whitening constraint is taken in.
    pub fn regularized(&self) -> DMatrix<T> {
        let d = self.within.nrows();
        &self.within + DMatrix::identity(d, d) * self.epsilon
    }

    pub fn to_snapshot(&self) -> ScatterSnapshot {
        ScatterSnapshot {
            d: self.within.nrows(),
            epsilon: self.epsilon.as_f64(),
            dropped_rank: self.dropped_rank,
            within: rows(&self.within),
            within_inv_sqrt: rows(&self.within_inv_sqrt),
        }
    }
}

/// JSON-friendly view of a [`ScatterPair`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterSnapshot {
    pub d: usize,
    pub epsilon: f64,
    pub dropped_rank: usize,
    pub within: Vec<Vec<f64>>,
    pub within_inv_sqrt: Vec<Vec<f64>>,
}

fn rows<T: Scalar>(a: &DMatrix<T>) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect()
}

/// Symmetric inverse square root of `within + εI` via eigendecomposition.
pub fn inverse_sqrt<T: Scalar>(within: &DMatrix<T>, policy: EpsilonPolicy) -> Result<ScatterPair<T>, ScatterError> {
    let (r, c) = within.shape();
    if r != c {
        return Err(ScatterError::NotSquare(r, c));
    }
    let skew = asymmetry(within);
    if skew > T::tolerance(1e-10) {
        return Err(ScatterError::NotSymmetric(skew));
    }
    let mut sym = within.clone();
    symmetrize(&mut sym);
    let eps = policy.resolve(&sym)?;
    let eps_t = T::cast(eps);
    let (values, vectors) = sorted_symmetric_eigen(sym.clone()).ok_or(ScatterError::EigenFailure)?;
    let dropped_rank = values.iter().filter(|&&v| v.as_f64() < eps).count();
    // eigenvalues this close to zero are rounding noise, not curvature
    let top = values.first().map_or(0.0, |v| v.as_f64().max(0.0));
    let floor = top * r as f64 * T::machine_epsilon();
    let mut scale = Vec::with_capacity(values.len());
    for v in values {
        let shifted = v + eps_t;
        if shifted <= T::zero() || shifted.as_f64() <= floor {
            return Err(ScatterError::Singular(shifted.as_f64()));
        }
        scale.push(T::one() / shifted.sqrt());
    }
    let scaled = DMatrix::from_fn(r, r, |i, k| vectors[(i, k)] * scale[k]);
    let mut inv_sqrt = scaled * vectors.transpose();
    symmetrize(&mut inv_sqrt);
    Ok(ScatterPair { within: sym, within_inv_sqrt: inv_sqrt, epsilon: eps_t, dropped_rank })
}

//! Classical LDA baselines solved as a generalized symmetric eigenproblem.
//!
//! [`fit_lda_eig`] uses the total-mean between-class scatter and
//! [`fit_flda_pairwise`] the pairwise one. The two scatters are equal, so both
//! maximize the same squared criterion and must return the same subspace.

use nalgebra::DMatrix;

use crate::dataset::LabeledDataset;
use crate::linalg::{fix_column_signs, sorted_symmetric_eigen, symmetrize, whitening_residual};
use crate::scatter::{
    between_scatter_pairwise, between_scatter_total_mean, class_statistics, inverse_sqrt, within_scatter,
    ClassStatistics, EpsilonPolicy, ScatterError, ScatterPair,
};
use crate::solver::{Method, Projection, SolverError};
use crate::Scalar;

/// Result of the generalized eigenproblem `S_b w = λ (S_w + εI) w`.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen<T: Scalar> {
    pub projection: Projection<T>,
    /// All generalized eigenvalues, descending.
    pub eigenvalues: Vec<T>,
}

impl<T: Scalar> GeneralizedEigen<T> {
    /// Sum of the eigenvalues matching the returned columns.
    pub fn top_sum(&self) -> T {
        self.eigenvalues[..self.projection.width()].iter().fold(T::zero(), |a, &v| a + v)
    }
}

/// Top-`m` generalized eigenvectors through the symmetric pencil
/// `S_w′ S_b S_w′`, mapped back by `S_w′`. Each column's largest-magnitude
/// entry is made positive.
pub fn solve_generalized<T: Scalar>(
    scatter: &ScatterPair<T>,
    between: &DMatrix<T>,
    m: usize,
    source: Method,
) -> Result<GeneralizedEigen<T>, SolverError> {
    let d = scatter.within.nrows();
    if m == 0 || m > d {
        return Err(SolverError::InvalidConfig(format!("target dimension {m} outside 1..={d}")));
    }
    let root = &scatter.within_inv_sqrt;
    let mut pencil = root * between * root;
    symmetrize(&mut pencil);
    let (eigenvalues, vectors) = sorted_symmetric_eigen(pencil).ok_or(ScatterError::EigenFailure)?;
    let mut w = root * vectors.columns(0, m);
    fix_column_signs(&mut w);
    let projection = Projection {
        constraint_residual: whitening_residual(&w, &scatter.regularized()),
        matrix: w,
        source,
        epsilon: scatter.epsilon.as_f64(),
    };
    Ok(GeneralizedEigen { projection, eigenvalues })
}

fn fit_with<T: Scalar>(
    data: &LabeledDataset<T>,
    m: usize,
    policy: EpsilonPolicy,
    source: Method,
    between: fn(&ClassStatistics<T>) -> DMatrix<T>,
) -> Result<GeneralizedEigen<T>, SolverError> {
    if m >= data.class_count() {
        log::warn!(
            "target dimension {m} exceeds rank bound {} of the between-class scatter; trailing directions are arbitrary",
            data.class_count() - 1
        );
    }
    let stats = class_statistics(data);
    let scatter = inverse_sqrt(&within_scatter(data, &stats), policy)?;
    solve_generalized(&scatter, &between(&stats), m, source)
}

/// Classical LDA with the total-mean between-class scatter.
pub fn fit_lda_eig<T: Scalar>(data: &LabeledDataset<T>, m: usize, policy: EpsilonPolicy) -> Result<Projection<T>, SolverError> {
    Ok(fit_lda_eig_spectrum(data, m, policy)?.projection)
}

pub fn fit_lda_eig_spectrum<T: Scalar>(
    data: &LabeledDataset<T>,
    m: usize,
    policy: EpsilonPolicy,
) -> Result<GeneralizedEigen<T>, SolverError> {
    fit_with(data, m, policy, Method::LdaEig, between_scatter_total_mean)
}

/// LDA with the pairwise between-class scatter (no total mean).
pub fn fit_flda_pairwise<T: Scalar>(data: &LabeledDataset<T>, m: usize, policy: EpsilonPolicy) -> Result<Projection<T>, SolverError> {
    Ok(fit_flda_pairwise_spectrum(data, m, policy)?.projection)
}

pub fn fit_flda_pairwise_spectrum<T: Scalar>(
    data: &LabeledDataset<T>,
    m: usize,
    policy: EpsilonPolicy,
) -> Result<GeneralizedEigen<T>, SolverError> {
    fit_with(data, m, policy, Method::Flda, between_scatter_pairwise)
}

/// `Σ_i (n_i/n) ‖Wᵀ(x̄_i − x̄)‖²`.
pub fn lda_objective<T: Scalar>(w: &DMatrix<T>, stats: &ClassStatistics<T>) -> T {
    let n = T::from_usize(stats.total).expect("count fits scalar");
    let centre = w.tr_mul(&stats.total_mean);
    let p = w.tr_mul(&stats.means);
    stats.counts.iter().enumerate().fold(T::zero(), |acc, (i, &ni)| {
        acc + T::from_usize(ni).expect("count fits scalar") / n * (p.column(i) - &centre).norm_squared()
    })
}

/// `Σ_{i<j} (n_i n_j/n²) ‖Wᵀ(x̄_i − x̄_j)‖²`.
pub fn pairwise_squared_objective<T: Scalar>(w: &DMatrix<T>, stats: &ClassStatistics<T>) -> T {
    let p = w.tr_mul(&stats.means);
    let c = stats.class_count();
    let mut total = T::zero();
    for i in 0..c {
        for j in (i + 1)..c {
            total += stats.pair_weight(i, j) * (p.column(i) - p.column(j)).norm_squared();
        }
    }
    total
}

//! Self-weighted robust linear discriminant analysis.
//!
//! The crate learns a projection `W` maximizing the unsquared, pairwise
//! between-class criterion `Σ_{i<j} (n_i n_j / n²) ‖Wᵀ(x̄_i − x̄_j)‖₂` under the
//! whitening constraint `Wᵀ S_w W = I`, next to classical LDA baselines, a
//! 1-NN / cross-validation harness and synthetic edge-class benchmarks.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`.

pub mod baselines;
pub mod cli;
pub mod dataset;
pub mod eval;
mod fsutil;
pub mod linalg;
mod scalar;
pub mod scatter;
pub mod solver;

pub use scalar::Scalar;

pub use baselines::{fit_flda_pairwise, fit_lda_eig};
pub use dataset::{DatasetError, GaussianSpec, LabeledDataset};
pub use eval::{cross_validate, EvaluationReport};
pub use scatter::{ClassStatistics, EpsilonPolicy, ScatterPair};
pub use solver::{fit, Method, Projection, SolverConfig, SolverTrace};

pub type LabeledDataset64 = LabeledDataset<f64>;
pub type LabeledDataset32 = LabeledDataset<f32>;
pub type ClassStatistics64 = ClassStatistics<f64>;
pub type ScatterPair64 = ScatterPair<f64>;
pub type Projection64 = Projection<f64>;
pub type Projection32 = Projection<f32>;
pub type Matrix64 = nalgebra::DMatrix<f64>;

use thiserror::Error;

/// Any failure surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Scatter(#[from] scatter::ScatterError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
}

impl Error {
    /// Whether the failure is numerical (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Dataset(_) => false,
            Error::Scatter(e) => !matches!(e, scatter::ScatterError::InvalidEpsilon(_)),
            Error::Solver(solver::SolverError::Scatter(e)) => !matches!(e, scatter::ScatterError::InvalidEpsilon(_)),
            Error::Solver(solver::SolverError::SvdFailure) => true,
            Error::Solver(_) => false,
            Error::Eval(e) => e.is_numerical(),
        }
    }
}

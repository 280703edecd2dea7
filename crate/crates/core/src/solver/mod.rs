//! The self-weighted robust LDA solver.
//!
//! Maximizes `Σ_{i<j} (n_i n_j / n²) ‖Wᵀ(x̄_i − x̄_j)‖₂` subject to
//! `Wᵀ(S_w + εI)W = I` by alternating between the unit pair directions
//! `s_ij` (which fix the implicit pair weights `1/‖Wᵀ(x̄_i − x̄_j)‖`) and the
//! linear trace problem `max Tr(WᵀM)`, solved in closed form by an SVD.

mod directions;
mod snapshot;
mod subproblem;

pub use directions::{assemble_m_fast, assemble_m_naive, pair_directions, PairDirections};
pub use snapshot::{write_trace_csv, ModelSnapshot};
pub use subproblem::{init_projection, solve_trace_subproblem, SvdRoute, TraceSolution};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LabeledDataset;
use crate::linalg::whitening_residual;
use crate::scatter::{class_statistics, inverse_sqrt, within_scatter, ClassStatistics, EpsilonPolicy, ScatterError};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error("singular value decomposition failed")]
    SvdFailure,
    #[error("dimension mismatch: expected {expected} rows, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Which projection method produced a [`Projection`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Swrlda,
    LdaEig,
    Flda,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Swrlda => "swrlda",
            Method::LdaEig => "lda_eig",
            Method::Flda => "flda",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "swrlda" => Ok(Method::Swrlda),
            "lda" | "lda_eig" => Ok(Method::LdaEig),
            "flda" => Ok(Method::Flda),
            other => Err(format!("unknown method {other:?} (expected swrlda, lda or flda)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MAssembly {
    #[default]
    Fast,
    Naive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub target_dim: usize,
    /// Stop once the relative objective change falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    pub epsilon_policy: EpsilonPolicy,
    pub m_assembly: MAssembly,
    pub svd_route: SvdRoute,
    /// Projected distances at or below this count as zero.
    pub zero_norm_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            target_dim: 1,
            tolerance: 1e-6,
            max_iterations: 100,
            seed: 0,
            epsilon_policy: EpsilonPolicy::default(),
            m_assembly: MAssembly::Fast,
            svd_route: SvdRoute::Thin,
            zero_norm_threshold: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn with_dim(target_dim: usize) -> Self {
        Self { target_dim, ..Self::default() }
    }

    pub fn validate(&self, d: usize) -> Result<(), SolverError> {
        if self.target_dim == 0 || self.target_dim > d {
            return Err(SolverError::InvalidConfig(format!(
                "target dimension {} outside 1..={d}",
                self.target_dim
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(SolverError::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.zero_norm_threshold >= 0.0) {
            return Err(SolverError::InvalidConfig("zero_norm_threshold must be non-negative".into()));
        }
        Ok(())
    }
}

/// A learned `d × m` projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection<T: Scalar> {
    pub matrix: DMatrix<T>,
    /// `‖Wᵀ(S_w + εI)W − I‖_F`.
    pub constraint_residual: f64,
    pub source: Method,
    pub epsilon: f64,
}

impl<T: Scalar> Projection<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn width(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Implicit self-weight of one class pair at the final iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWeight {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    /// `1/distance`; absent for pairs below the zero-norm threshold.
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    /// Objective at the initial point followed by one value per iteration.
    pub objectives: Vec<f64>,
    /// Whitening residual of every iterate, aligned with `objectives`.
    pub constraint_residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub weights_snapshot: Vec<PairWeight>,
}

/// Projected distance of one unordered class pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDistance {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

/// `‖Wᵀ(x̄_i − x̄_j)‖₂` for all `i < j`, in lexicographic order.
pub fn pair_distances<T: Scalar>(w: &DMatrix<T>, stats: &ClassStatistics<T>) -> Vec<PairDistance> {
    let p = w.tr_mul(&stats.means);
    let c = stats.class_count();
    let mut out = Vec::with_capacity(c * c.saturating_sub(1) / 2);
    for i in 0..c {
        for j in (i + 1)..c {
            let distance = (p.column(i) - p.column(j)).norm().as_f64();
            out.push(PairDistance { i, j, distance });
        }
    }
    out
}

/// `Σ_{i<j} (n_i n_j / n²) ‖Wᵀ(x̄_i − x̄_j)‖₂`, equal to the ordered-pair sum
/// with weights `n_i n_j / 2n²`.
pub fn objective<T: Scalar>(w: &DMatrix<T>, stats: &ClassStatistics<T>) -> T {
    let p = w.tr_mul(&stats.means);
    let c = stats.class_count();
    let mut total = T::zero();
    for i in 0..c {
        for j in (i + 1)..c {
            total += stats.pair_weight(i, j) * (p.column(i) - p.column(j)).norm();
        }
    }
    total
}

/// `WᵀX` for a `d × n` matrix `X`.
pub fn project<T: Scalar>(x: &DMatrix<T>, w: &DMatrix<T>) -> Result<DMatrix<T>, SolverError> {
    if x.nrows() != w.nrows() {
        return Err(SolverError::DimensionMismatch { expected: w.nrows(), found: x.nrows() });
    }
    Ok(w.tr_mul(x))
}

pub fn project_dataset<T: Scalar>(data: &LabeledDataset<T>, w: &DMatrix<T>) -> Result<DMatrix<T>, SolverError> {
    project(data.features(), w)
}

fn relative_change(new: f64, old: f64) -> f64 {
    (new - old).abs() / old.abs().max(1e-30)
}

/// Runs the re-weighted iteration to convergence.
///
/// Non-convergence within `max_iterations` is not an error: the best iterate
/// is returned with `converged = false`.
pub fn fit<T: Scalar>(data: &LabeledDataset<T>, config: &SolverConfig) -> Result<(Projection<T>, SolverTrace), SolverError> {
    config.validate(data.dim())?;
    let stats = class_statistics(data);
    let scatter = inverse_sqrt(&within_scatter(data, &stats), config.epsilon_policy)?;
    let metric = scatter.regularized();
    let tau = config.zero_norm_threshold;

    let mut w = init_projection(data.dim(), config.target_dim, &scatter.within_inv_sqrt, config.seed);
    let mut current = objective(&w, &stats).as_f64();
    let mut objectives = vec![current];
    let mut constraint_residuals = vec![whitening_residual(&w, &metric)];
    let mut best = (current, w.clone());
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        let m = match config.m_assembly {
            MAssembly::Fast => assemble_m_fast(&stats, &w.tr_mul(&stats.means), tau),
            MAssembly::Naive => assemble_m_naive(&stats, &pair_directions(&w, &stats, tau)),
        };
        w = solve_trace_subproblem(&m, &scatter, config.svd_route)?.projection;
        iterations += 1;
        let next = objective(&w, &stats).as_f64();
        objectives.push(next);
        constraint_residuals.push(whitening_residual(&w, &metric));
        log::debug!("iteration {iterations}: objective {next:e}");
        if next > best.0 {
            best = (next, w.clone());
        }
        let change = relative_change(next, current);
        current = next;
        if change < config.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("solver stopped after {iterations} iterations without converging");
        w = best.1;
    }

    let weights_snapshot = pair_distances(&w, &stats)
        .into_iter()
        .map(|p| PairWeight {
            i: p.i,
            j: p.j,
            distance: p.distance,
            weight: (p.distance > tau).then(|| 1.0 / p.distance),
        })
        .collect();
    let projection = Projection {
        constraint_residual: whitening_residual(&w, &metric),
        matrix: w,
        source: Method::Swrlda,
        epsilon: scatter.epsilon.as_f64(),
    };
    let trace = SolverTrace { objectives, constraint_residuals, iterations, converged, weights_snapshot };
    Ok((projection, trace))
}

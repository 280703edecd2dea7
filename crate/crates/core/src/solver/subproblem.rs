use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::linalg::{checked_svd, complete_orthonormal, sorted_symmetric_eigen};
use crate::scatter::ScatterPair;
use crate::Scalar;

/// How the `d × m` SVD of `A = S_w′ M` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvdRoute {
    /// Thin SVD of `A` directly.
    #[default]
    Thin,
    /// Eigenvectors of `AᵀA` give `V`; `U = A V Σ⁻¹`, completed where `σ = 0`.
    Gram,
}

/// Seeded feasible start: `W = S_w′ Q` with `Q` the orthonormal QR factor of
/// a standard-Gaussian `d × m` matrix, so `Wᵀ(S_w + εI)W = I`.
pub fn init_projection<T: Scalar>(d: usize, m: usize, within_inv_sqrt: &DMatrix<T>, seed: u64) -> DMatrix<T> {
    assert!(m >= 1 && m <= d, "projection width must be in 1..=d");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian = DMatrix::from_fn(d, m, |_, _| {
        let v: f64 = StandardNormal.sample(&mut rng);
        T::cast(v)
    });
    let q = gaussian.qr().q();
    within_inv_sqrt * q
}

/// Maximizer of `Tr(WᵀM)` subject to `Wᵀ(S_w + εI)W = I`.
#[derive(Debug, Clone)]
pub struct TraceSolution<T: Scalar> {
    pub projection: DMatrix<T>,
    /// Singular values of `A = S_w′ M`; their sum is the attained maximum.
    pub singular_values: Vec<T>,
}

impl<T: Scalar> TraceSolution<T> {
    pub fn optimum(&self) -> T {
        self.singular_values.iter().fold(T::zero(), |acc, &s| acc + s)
    }
}

fn significant<T: Scalar>(values: &[T], rank_scale: usize) -> Vec<bool> {
    let top = values.iter().fold(0.0f64, |acc, v| acc.max(v.as_f64()));
    let cutoff = top * 10.0 * rank_scale as f64 * T::machine_epsilon();
    values.iter().map(|v| top > 0.0 && v.as_f64() > cutoff).collect()
}

/// Closed-form solve: `A = S_w′ M = U Σ Vᵀ` (thin), `W = S_w′ U Vᵀ`.
pub fn solve_trace_subproblem<T: Scalar>(
    m: &DMatrix<T>,
    scatter: &ScatterPair<T>,
    route: SvdRoute,
) -> Result<TraceSolution<T>, SolverError> {
    let (d, width) = m.shape();
    if d < width {
        return Err(SolverError::InvalidConfig(format!("M is {d}x{width}; need d >= m")));
    }
    if scatter.within_inv_sqrt.nrows() != d {
        return Err(SolverError::DimensionMismatch { expected: scatter.within_inv_sqrt.nrows(), found: d });
    }
    let a = &scatter.within_inv_sqrt * m;
    let (mut u, v_t, sigma) = match route {
        SvdRoute::Thin => checked_svd(&a).ok_or(SolverError::SvdFailure)?,
        SvdRoute::Gram => {
            let (lambda, v) = sorted_symmetric_eigen(a.tr_mul(&a)).ok_or(SolverError::SvdFailure)?;
            let sigma: Vec<T> = lambda.iter().map(|&l| if l > T::zero() { l.sqrt() } else { T::zero() }).collect();
            let mut u = &a * &v;
            let keep = significant(&sigma, d);
            for (k, &s) in sigma.iter().enumerate() {
                if keep[k] {
                    let mut col = u.column_mut(k);
                    col /= s;
                }
            }
            // recovered columns lose orthogonality as σ_k shrinks; re-orthonormalize in σ order
            let mut accepted: Vec<nalgebra::DVector<T>> = Vec::new();
            for k in 0..width {
                if !keep[k] {
                    continue;
                }
                let mut col = u.column(k).into_owned();
                for a in &accepted {
                    let p = a.dot(&col);
                    col.axpy(-p, a, T::one());
                }
                let norm = col.norm();
                col /= norm;
                u.set_column(k, &col);
                accepted.push(col);
            }
            (u, v.transpose(), sigma)
        }
    };
    let keep = significant(&sigma, d);
    complete_orthonormal(&mut u, &keep);
    let projection = &scatter.within_inv_sqrt * u * v_t;
    Ok(TraceSolution { projection, singular_values: sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{relative_frobenius, whitening_residual};
    use crate::scatter::{inverse_sqrt, EpsilonPolicy};
    use rand::{Rng, SeedableRng};

    fn spd(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let b = DMatrix::from_fn(d, d + 3, |_, _| rng.random_range(-1.0..1.0));
        &b * b.transpose()
    }

    #[test]
    fn identity_scatter_gives_orthonormal_w() {
        let id = inverse_sqrt(&DMatrix::<f64>::identity(6, 6), EpsilonPolicy::Absolute(0.0)).unwrap();
        let w = init_projection(6, 3, &id.within_inv_sqrt, 42);
        assert!(whitening_residual(&w, &DMatrix::identity(6, 6)) < 1e-10);
        assert_eq!(w, init_projection(6, 3, &id.within_inv_sqrt, 42));
        assert_ne!(w, init_projection(6, 3, &id.within_inv_sqrt, 43));
    }

    #[test]
    fn random_spd_start_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for seed in 0..10 {
            let pair = inverse_sqrt(&spd(7, &mut rng), EpsilonPolicy::default()).unwrap();
            let w = init_projection(7, 4, &pair.within_inv_sqrt, seed);
            assert!(whitening_residual(&w, &pair.regularized()) <= 1e-8);
        }
    }

    #[test]
    fn orthonormal_m_with_identity_scatter_returns_m() {
        let id = inverse_sqrt(&DMatrix::<f64>::identity(4, 4), EpsilonPolicy::Absolute(0.0)).unwrap();
        let m = init_projection(4, 2, &id.within_inv_sqrt, 3);
        for route in [SvdRoute::Thin, SvdRoute::Gram] {
            let sol = solve_trace_subproblem(&m, &id, route).unwrap();
            assert!(relative_frobenius(&sol.projection, &m) < 1e-12, "{route:?}");
            for s in &sol.singular_values {
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn attains_singular_value_sum_and_constraint() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let pair = inverse_sqrt(&spd(6, &mut rng), EpsilonPolicy::default()).unwrap();
            let m = DMatrix::from_fn(6, 3, |_, _| rng.random_range(-2.0..2.0));
            let thin = solve_trace_subproblem(&m, &pair, SvdRoute::Thin).unwrap();
            let gram = solve_trace_subproblem(&m, &pair, SvdRoute::Gram).unwrap();
            let value = (thin.projection.transpose() * &m).trace();
            assert!((value - thin.optimum()).abs() < 1e-10 * value.abs().max(1.0));
            assert!(whitening_residual(&thin.projection, &pair.regularized()) < 1e-8);
            assert!(relative_frobenius(&gram.projection, &thin.projection) < 1e-6);
        }
    }

    #[test]
    fn rank_deficient_m_still_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pair = inverse_sqrt(&spd(5, &mut rng), EpsilonPolicy::default()).unwrap();
        let col = nalgebra::DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
        let mut m = DMatrix::zeros(5, 3);
        m.set_column(0, &col);
        m.set_column(2, &(col.clone() * 2.0));
        for route in [SvdRoute::Thin, SvdRoute::Gram] {
            let sol = solve_trace_subproblem(&m, &pair, route).unwrap();
            assert!(whitening_residual(&sol.projection, &pair.regularized()) < 1e-8, "{route:?}");
            let value = (sol.projection.transpose() * &m).trace();
            assert!((value - sol.optimum()).abs() < 1e-10 * value.abs().max(1.0));
        }
        let zero = solve_trace_subproblem(&DMatrix::zeros(5, 2), &pair, SvdRoute::Thin).unwrap();
        assert!(whitening_residual(&zero.projection, &pair.regularized()) < 1e-8);
    }
}

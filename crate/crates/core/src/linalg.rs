//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::Scalar;

/// Frobenius norm widened to `f64`.
pub fn frobenius<T: Scalar>(a: &DMatrix<T>) -> f64 {
    a.iter().map(|v| v.as_f64().powi(2)).sum::<f64>().sqrt()
}

/// `‖a − b‖_F / max(‖b‖_F, tiny)`.
pub fn relative_frobenius<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    let diff = frobenius(&(a - b));
    let scale = frobenius(b);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Relative asymmetry `‖A − Aᵀ‖_F / ‖A‖_F` (0 for the zero matrix).
pub fn asymmetry<T: Scalar>(a: &DMatrix<T>) -> f64 {
    let scale = frobenius(a);
    if scale == 0.0 {
        return 0.0;
    }
    frobenius(&(a - a.transpose())) / scale
}

/// Replaces `a` by `(a + aᵀ)/2`.
pub fn symmetrize<T: Scalar>(a: &mut DMatrix<T>) {
    let half = T::cast(0.5);
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (a[(i, j)] + a[(j, i)]) * half;
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

/// `‖Wᵀ S W − I‖_F`.
pub fn whitening_residual<T: Scalar>(w: &DMatrix<T>, metric: &DMatrix<T>) -> f64 {
    let gram = w.transpose() * metric * w;
    frobenius(&(gram - DMatrix::identity(w.ncols(), w.ncols())))
}

/// Iteration cap handed to nalgebra's iterative decompositions.
pub const MAX_DECOMPOSITION_ITERATIONS: usize = 100_000;

/// Symmetric eigendecomposition with eigenpairs sorted by descending
/// eigenvalue; equal eigenvalues keep their original order.
///
/// `None` when the QR iteration fails to converge.
pub fn sorted_symmetric_eigen<T: Scalar>(a: DMatrix<T>) -> Option<(Vec<T>, DMatrix<T>)> {
    let eig = SymmetricEigen::try_new(a, T::default_epsilon(), MAX_DECOMPOSITION_ITERATIONS)?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Some((values, vectors))
}

/// Flips the sign of each column so that its largest-magnitude entry is
/// positive (first such entry on ties).
pub fn fix_column_signs<T: Scalar>(w: &mut DMatrix<T>) {
    for mut col in w.column_iter_mut() {
        let mut best = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < T::zero() {
            col.neg_mut();
        }
    }
}

/// Makes the columns of `u` orthonormal, in place.
///
/// Columns flagged in `keep` are assumed orthonormal already and are left
/// untouched; every other column is replaced by a unit vector orthogonal to
/// all previously accepted columns, drawn from the canonical basis.
pub fn complete_orthonormal<T: Scalar>(u: &mut DMatrix<T>, keep: &[bool]) {
    let (rows, cols) = u.shape();
    let mut accepted: Vec<DVector<T>> = (0..cols)
        .filter(|&k| keep[k])
        .map(|k| u.column(k).into_owned())
        .collect();
    let mut candidate = 0;
    for k in 0..cols {
        if keep[k] {
            continue;
        }
        loop {
            assert!(candidate < rows, "orthonormal completion needs rows >= cols");
            let mut v = DVector::from_fn(rows, |r, _| if r == candidate { T::one() } else { T::zero() });
            candidate += 1;
            // two Gram-Schmidt passes
            for _ in 0..2 {
                for a in &accepted {
                    let proj = a.dot(&v);
                    v.axpy(-proj, a, T::one());
                }
            }
            let norm = v.norm();
            if norm.as_f64() > 1e-6 {
                v /= norm;
                u.set_column(k, &v);
                accepted.push(v);
                break;
            }
        }
    }
}

/// Mean of the given columns of `x`.
pub fn column_mean<T: Scalar>(x: &DMatrix<T>, columns: &[usize]) -> DVector<T> {
    let mut sum = DVector::zeros(x.nrows());
    for &j in columns {
        sum += x.column(j);
    }
    sum / T::from_usize(columns.len()).expect("count fits scalar")
}


/// Thin SVD `A = U Σ Vᵀ` whose reconstruction has been checked.
///
/// nalgebra's bidiagonal iteration can return factors that do not reproduce
/// a rank-deficient `A` when run at machine-epsilon tolerance, so the
/// tolerance is loosened step by step until `‖UΣVᵀ − A‖ ≤ tol·‖A‖`.
/// Returns `(U, Vᵀ, σ)` or `None` if no attempt verifies.
pub fn checked_svd<T: Scalar>(a: &DMatrix<T>) -> Option<(DMatrix<T>, DMatrix<T>, Vec<T>)> {
    let scale = frobenius(a);
    let tol = T::tolerance(1e-10) * scale.max(f64::MIN_POSITIVE);
    for factor in [64.0, 1024.0, 16384.0] {
        let eps = T::cast(factor * T::machine_epsilon());
        let Some(svd) = SVD::try_new(a.clone(), true, true, eps, MAX_DECOMPOSITION_ITERATIONS) else {
            continue;
        };
        let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
            continue;
        };
        let recon = &u * DMatrix::from_diagonal(&svd.singular_values) * &v_t;
        if frobenius(&(recon - a)) <= tol {
            return Some((u, v_t, svd.singular_values.iter().copied().collect()));
        }
        log::debug!("SVD reconstruction failed at tolerance {factor}·eps; retrying");
    }
    None
}

/// Largest principal angle (radians) between the column spaces of `a` and
/// `b`, both of full column rank and equal width.
///
/// Computed from the sine side, `asin ‖(I − Q_a Q_aᵀ) Q_b‖₂`, which stays
/// accurate for tiny angles.
pub fn max_principal_angle<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "subspaces must have equal shape");
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let residual = &qb - &qa * qa.tr_mul(&qb);
    let sine = residual
        .singular_values()
        .iter()
        .fold(0.0f64, |acc, s| acc.max(s.as_f64()));
    sine.min(1.0).asin()
}

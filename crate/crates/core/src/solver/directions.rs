use nalgebra::{DMatrix, DVector};

use crate::scatter::ClassStatistics;
use crate::Scalar;

/// Unit directions `s_ij` of projected class-mean differences, for every
/// ordered pair. `s_ji = −s_ij`; pairs closer than the threshold get zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDirections<T: Scalar> {
    classes: usize,
    /// `m × c²`, column `i·c + j` holds `s_ij`.
    vectors: DMatrix<T>,
}

impl<T: Scalar> PairDirections<T> {
    pub fn get(&self, i: usize, j: usize) -> DVector<T> {
        self.vectors.column(i * self.classes + j).into_owned()
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }
}

fn unit_or_zero<T: Scalar>(v: DVector<T>, threshold: f64) -> DVector<T> {
    let norm = v.norm();
    if norm.as_f64() > threshold {
        v / norm
    } else {
        DVector::zeros(v.len())
    }
}

/// `s_ij = Wᵀ(x̄_i − x̄_j) / ‖Wᵀ(x̄_i − x̄_j)‖`, or zero when that norm is at
/// most `zero_norm_threshold`.
///
/// The difference is taken between projected means `Wᵀx̄_i − Wᵀx̄_j`, the
/// same rounding the fast assembly sees, so both paths agree even for nearly
/// coincident means.
pub fn pair_directions<T: Scalar>(
    w: &DMatrix<T>,
    stats: &ClassStatistics<T>,
    zero_norm_threshold: f64,
) -> PairDirections<T> {
    let c = stats.class_count();
    let m = w.ncols();
    let projected = w.tr_mul(&stats.means);
    let mut vectors = DMatrix::zeros(m, c * c);
    for i in 0..c {
        for j in (i + 1)..c {
            let s = unit_or_zero(projected.column(i) - projected.column(j), zero_norm_threshold);
            vectors.set_column(i * c + j, &s);
            vectors.set_column(j * c + i, &(-s));
        }
    }
    PairDirections { classes: c, vectors }
}

/// `M = Σ_{i≠j} (n_i n_j / 2n²)(x̄_i − x̄_j) s_ijᵀ`, summed literally over
/// ordered pairs.
pub fn assemble_m_naive<T: Scalar>(stats: &ClassStatistics<T>, directions: &PairDirections<T>) -> DMatrix<T> {
    let c = stats.class_count();
    let half = T::cast(0.5);
    let mut m = DMatrix::zeros(stats.dim(), directions.dim());
    for i in 0..c {
        for j in 0..c {
            if i == j {
                continue;
            }
            let diff = stats.mean_difference(i, j);
            let s = directions.get(i, j);
            m.ger(stats.pair_weight(i, j) * half, &diff, &s, T::one());
        }
    }
    m
}

/// Same `M` from the projected means `P = WᵀX̄` through the per-class
/// aggregates `s_i. = Σ_j n_j s_ij` and `s_.i = Σ_j n_j s_ji`:
/// `M = (1/2n²) Σ_i n_i x̄_i (s_i. − s_.i)ᵀ`.
///
/// Costs `O(c²m + cdm)`; no `d × m` outer product is formed per pair.
pub fn assemble_m_fast<T: Scalar>(stats: &ClassStatistics<T>, projected_means: &DMatrix<T>, zero_norm_threshold: f64) -> DMatrix<T> {
    let c = stats.class_count();
    let m = projected_means.nrows();
    assert_eq!(projected_means.ncols(), c, "one projected mean per class");
    let counts: Vec<T> = stats.counts.iter().map(|&k| T::from_usize(k).expect("count fits scalar")).collect();
    let mut row_sums = DMatrix::<T>::zeros(m, c);
    let mut col_sums = DMatrix::<T>::zeros(m, c);
    for i in 0..c {
        for j in (i + 1)..c {
            let diff = projected_means.column(i) - projected_means.column(j);
            let s = unit_or_zero(diff, zero_norm_threshold);
            // s_ij contributes to s_i. and s_.j; s_ji = −s_ij to s_j. and s_.i
            row_sums.column_mut(i).axpy(counts[j], &s, T::one());
            col_sums.column_mut(j).axpy(counts[i], &s, T::one());
            row_sums.column_mut(j).axpy(-counts[i], &s, T::one());
            col_sums.column_mut(i).axpy(-counts[j], &s, T::one());
        }
    }
    let n = T::from_usize(stats.total).expect("count fits scalar");
    let scale = T::one() / (T::cast(2.0) * n * n);
    // Σ_i n_i x̄_i (s_i. − s_.i)ᵀ = X̄ · diag(n) · (R − C)ᵀ. The weights
    // n_i (s_i. − s_.i) sum to zero, so the means may be shifted by x̄_0
    // first; this avoids cancellation when class means nearly coincide.
    let mut weighted = (row_sums - col_sums).transpose();
    for (i, &ni) in counts.iter().enumerate() {
        let mut r = weighted.row_mut(i);
        r *= ni * scale;
    }
    let mut shifted = stats.means.clone();
    let reference = stats.means.column(0).clone_owned();
    for mut col in shifted.column_iter_mut() {
        col -= &reference;
    }
    shifted * weighted
}

mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use swrlda::baselines::{lda_objective, pairwise_squared_objective};
use swrlda::linalg::{asymmetry, relative_frobenius};
use swrlda::scatter::{between_scatter_pairwise, between_scatter_total_mean, class_statistics, inverse_sqrt, within_scatter};
use swrlda::{ClassStatistics, EpsilonPolicy};

fn matrix(rows: usize, cols: usize, values: Vec<f64>) -> DMatrix<f64> {
    DMatrix::from_vec(rows, cols, values)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn weighted_variance_equals_half_pairwise_sum(
        (c, d, raw, u) in (2usize..10, 1usize..6).prop_flat_map(|(c, d)| (
            Just(c),
            Just(d),
            prop::collection::vec(0.01f64..1.0, c),
            prop::collection::vec(-10.0f64..10.0, c * d),
        ))
    ) {
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let u = matrix(d, c, u);
        let centre = (0..c).fold(DVector::zeros(d), |acc, i| acc + u.column(i) * p[i]);
        let lhs: f64 = (0..c).map(|i| p[i] * (u.column(i) - &centre).norm_squared()).sum();
        let mut rhs = 0.0;
        for i in 0..c {
            for j in 0..c {
                rhs += p[i] * p[j] / 2.0 * (u.column(i) - u.column(j)).norm_squared();
            }
        }
        prop_assert!(common::relative(lhs, rhs) <= 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn total_mean_and_pairwise_criteria_agree_for_any_projection(
        (d, c, m, means, counts, w) in (1usize..7, 2usize..8).prop_flat_map(|(d, c)| (1..=d).prop_flat_map(move |m| (
            Just(d),
            Just(c),
            Just(m),
            prop::collection::vec(-5.0f64..5.0, d * c),
            prop::collection::vec(1usize..100, c),
            prop::collection::vec(-2.0f64..2.0, d * m),
        )))
    ) {
        let stats = ClassStatistics::from_means(matrix(d, c, means), counts);
        let w = matrix(d, m, w);
        let a = lda_objective(&w, &stats);
        let b = pairwise_squared_objective(&w, &stats);
        prop_assert!(common::relative(a, b) <= 1e-10 || a.abs() < 1e-280, "{a} vs {b}");
        prop_assert!(relative_frobenius(&between_scatter_total_mean(&stats), &between_scatter_pairwise(&stats)) <= 1e-10);
    }
}

#[test]
fn within_scatter_is_positive_semidefinite_and_root_symmetric() {
    for seed in 0..30 {
        let mut rng = common::rng(seed);
        let d = 2 + (seed as usize % 12);
        let data = common::blobs(seed, d, 3, 2, 12, 3.0);
        let stats = class_statistics(&data);
        let sw = within_scatter(&data, &stats);
        let lowest = sw.clone().symmetric_eigen().eigenvalues.min();
        assert!(lowest >= -1e-8 * sw.norm(), "seed {seed}: {lowest}");
        let pair = inverse_sqrt(&sw, EpsilonPolicy::default()).unwrap();
        assert!(asymmetry(&pair.within_inv_sqrt) <= 1e-10);
        let recon = &pair.within_inv_sqrt * pair.regularized() * &pair.within_inv_sqrt;
        assert!(relative_frobenius(&recon, &DMatrix::identity(d, d)) <= 1e-8);
        let _ = common::random_spd(&mut rng, 2);
    }
}

#[test]
fn dataset_level_scatter_forms_agree() {
    for seed in 0..20 {
        let data = common::blobs(100 + seed, 4, 2 + seed as usize % 6, 3, 30, 5.0);
        let stats = class_statistics(&data);
        assert!(relative_frobenius(&between_scatter_total_mean(&stats), &between_scatter_pairwise(&stats)) <= 1e-10);
    }
}

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DatasetError, LabeledDataset};
use crate::Scalar;

/// One cross-validation split; both index lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified `k`-fold assignment.
///
/// Each class is shuffled independently and dealt round-robin into the
/// folds, starting where the previous class stopped, so per-class fold sizes
/// differ by at most one and so do total fold sizes.
pub fn stratified_folds<T: Scalar>(data: &LabeledDataset<T>, k: usize, seed: u64) -> Result<Vec<Fold>, DatasetError> {
    if k == 0 {
        return Err(DatasetError::ZeroFolds);
    }
    let groups = data.class_indices();
    if let Some((class, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < k) {
        return Err(DatasetError::ClassTooSmall { class, size: g.len(), k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; data.len()];
    let mut next = 0;
    for mut group in groups {
        group.shuffle(&mut rng);
        for j in group {
            assignment[j] = next;
            next = (next + 1) % k;
        }
    }
    Ok((0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&j| assignment[j] == f);
            Fold { train, test }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn balanced(per: &[usize]) -> LabeledDataset<f64> {
        let labels: Vec<usize> = per.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat(c).take(n)).collect();
        let n = labels.len();
        LabeledDataset::new(DMatrix::from_fn(1, n, |_, j| j as f64), labels, per.len()).unwrap()
    }

    #[test]
    fn one_sample_per_class_per_fold() {
        let data = balanced(&[5, 5]);
        for fold in stratified_folds(&data, 5, 3).unwrap() {
            assert_eq!(fold.test.len(), 2);
            let labels: Vec<usize> = fold.test.iter().map(|&j| data.labels()[j]).collect();
            assert!(labels.contains(&0) && labels.contains(&1));
            assert_eq!(fold.train.len(), 8);
        }
    }

    #[test]
    fn class_smaller_than_k() {
        let data = balanced(&[5, 3]);
        assert!(matches!(
            stratified_folds(&data, 4, 0),
            Err(DatasetError::ClassTooSmall { class: 1, size: 3, k: 4 })
        ));
    }

    #[test]
    fn deterministic() {
        let data = balanced(&[7, 9, 4]);
        assert_eq!(stratified_folds(&data, 3, 11).unwrap(), stratified_folds(&data, 3, 11).unwrap());
        assert_ne!(stratified_folds(&data, 3, 11).unwrap(), stratified_folds(&data, 3, 12).unwrap());
    }

    proptest! {
        #[test]
        fn partition_and_balance(
            sizes in proptest::collection::vec(1usize..30, 2..6), k in 1usize..6, seed in any::<u64>()
        ) {
            prop_assume!(sizes.iter().all(|&s| s >= k));
            let data = balanced(&sizes);
            let folds = stratified_folds(&data, k, seed).unwrap();
            prop_assert_eq!(folds.len(), k);
            let mut seen = vec![0; data.len()];
            for f in &folds {
                for &j in &f.test { seen[j] += 1; }
                prop_assert_eq!(f.train.len() + f.test.len(), data.len());
                prop_assert!(f.train.iter().all(|j| !f.test.contains(j)));
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
            for class in 0..sizes.len() {
                let counts: Vec<usize> = folds.iter()
                    .map(|f| f.test.iter().filter(|&&j| data.labels()[j] == class).count())
                    .collect();
                let lo = *counts.iter().min().unwrap();
                let hi = *counts.iter().max().unwrap();
                prop_assert!(hi - lo <= 1);
            }
        }
    }
}

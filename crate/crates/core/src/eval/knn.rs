use nalgebra::DMatrix;

use super::EvalError;
use crate::Scalar;

/// k-nearest-neighbour labels under Euclidean distance.
///
/// Points are columns. Distance ties go to the lower training index; vote
/// ties go to the tied label whose member is nearest.
pub fn knn_classify<T: Scalar>(
    train: &DMatrix<T>,
    train_labels: &[usize],
    query: &DMatrix<T>,
    k: usize,
) -> Result<Vec<usize>, EvalError> {
    let n_train = train.ncols();
    if n_train == 0 {
        return Err(EvalError::EmptyTraining);
    }
    if train_labels.len() != n_train {
        return Err(EvalError::Shape(format!("{} labels for {n_train} training points", train_labels.len())));
    }
    if k == 0 || k > n_train {
        return Err(EvalError::InvalidK { k, n_train });
    }
    if query.nrows() != train.nrows() {
        return Err(EvalError::Shape(format!(
            "query dimension {} differs from training dimension {}",
            query.nrows(),
            train.nrows()
        )));
    }
    let classes = train_labels.iter().max().map_or(0, |&l| l + 1);
    let mut distances: Vec<(T, usize)> = Vec::with_capacity(n_train);
    let mut votes = vec![0usize; classes];
    let mut out = Vec::with_capacity(query.ncols());
    for q in query.column_iter() {
        distances.clear();
        distances.extend(train.column_iter().enumerate().map(|(j, t)| ((t - q).norm_squared(), j)));
        let by_distance = |a: &(T, usize), b: &(T, usize)| {
            a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1))
        };
        if k == 1 {
            let nearest = distances.iter().copied().min_by(by_distance).expect("non-empty");
            out.push(train_labels[nearest.1]);
            continue;
        }
        distances.select_nth_unstable_by(k - 1, by_distance);
        let neighbours = &mut distances[..k];
        neighbours.sort_by(by_distance);
        votes.iter_mut().for_each(|v| *v = 0);
        for &(_, j) in neighbours.iter() {
            votes[train_labels[j]] += 1;
        }
        let top = *votes.iter().max().expect("at least one class");
        let winner = neighbours
            .iter()
            .map(|&(_, j)| train_labels[j])
            .find(|&l| votes[l] == top)
            .expect("some neighbour carries the top vote");
        out.push(winner);
    }
    Ok(out)
}

/// Fraction of positions where the two label slices agree.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(predicted.len(), truth.len());
    if truth.is_empty() {
        return 0.0;
    }
    predicted.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_match_and_tie_rule() {
        let train = DMatrix::from_row_slice(1, 3, &[0.0, 2.0, 5.0]);
        let labels = [2, 0, 1];
        assert_eq!(knn_classify(&train, &labels, &DMatrix::from_row_slice(1, 1, &[5.0]), 1).unwrap(), vec![1]);
        // 1.0 is equidistant from index 0 and 1
        assert_eq!(knn_classify(&train, &labels, &DMatrix::from_row_slice(1, 1, &[1.0]), 1).unwrap(), vec![2]);
    }

    #[test]
    fn vote_tie_goes_to_nearest_member() {
        let train = DMatrix::from_row_slice(1, 4, &[0.0, 1.0, 3.0, 10.0]);
        let labels = [0, 1, 1, 0];
        let q = DMatrix::from_row_slice(1, 1, &[0.9]);
        assert_eq!(knn_classify(&train, &labels, &q, 2).unwrap(), vec![1]);
        assert_eq!(knn_classify(&train, &labels, &q, 3).unwrap(), vec![1]);
        assert_eq!(knn_classify(&train, &labels, &DMatrix::from_row_slice(1, 1, &[0.2]), 2).unwrap(), vec![0]);
    }

    #[test]
    fn errors() {
        let empty = DMatrix::<f64>::zeros(2, 0);
        assert!(matches!(knn_classify(&empty, &[], &DMatrix::zeros(2, 1), 1), Err(EvalError::EmptyTraining)));
        let train = DMatrix::<f64>::zeros(2, 2);
        assert!(matches!(
            knn_classify(&train, &[0, 1], &DMatrix::zeros(2, 1), 3),
            Err(EvalError::InvalidK { k: 3, n_train: 2 })
        ));
    }

    #[test]
    fn one_nn_matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let train: DMatrix<f64> = DMatrix::from_fn(3, 60, |_, _| rng.random_range(-1.0..1.0));
        let labels: Vec<usize> = (0..60).map(|_| rng.random_range(0..3)).collect();
        let query = DMatrix::from_fn(3, 200, |_, _| rng.random_range(-1.0..1.0));
        let got = knn_classify(&train, &labels, &query, 1).unwrap();
        for (q, &pred) in query.column_iter().zip(&got) {
            let mut best = (f64::INFINITY, 0);
            for j in 0..60 {
                let d: f64 = (0..3).map(|r| (train[(r, j)] - q[r]).powi(2)).sum();
                if d < best.0 {
                    best = (d, j);
                }
            }
            assert_eq!(pred, labels[best.1]);
        }
    }

    #[test]
    fn self_classification_is_perfect() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let train = DMatrix::from_fn(2, 50, |_, _| rng.random_range(-1.0..1.0));
        let labels: Vec<usize> = (0..50).map(|_| rng.random_range(0..4)).collect();
        let pred = knn_classify(&train, &labels, &train, 1).unwrap();
        assert_eq!(accuracy(&pred, &labels), 1.0);
    }
}

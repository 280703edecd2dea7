#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use swrlda::{ClassStatistics, LabeledDataset};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Gaussian blobs with class means spread over `[-spread, spread]^d` and
/// unbalanced class sizes in `min_size..=max_size`.
pub fn blobs(seed: u64, d: usize, c: usize, min_size: usize, max_size: usize, spread: f64) -> LabeledDataset<f64> {
    let mut rng = rng(seed);
    let means = DMatrix::from_fn(d, c, |_, _| rng.random_range(-spread..spread));
    let sizes: Vec<usize> = (0..c).map(|_| rng.random_range(min_size..=max_size)).collect();
    let n: usize = sizes.iter().sum();
    let mut x = DMatrix::zeros(d, n);
    let mut labels = Vec::with_capacity(n);
    let mut col = 0;
    for (class, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            for r in 0..d {
                x[(r, col)] = means[(r, class)] + rng.sample::<f64, _>(StandardNormal);
            }
            labels.push(class);
            col += 1;
        }
    }
    LabeledDataset::new(x, labels, c).unwrap()
}

pub fn random_stats(rng: &mut ChaCha8Rng, d: usize, c: usize) -> ClassStatistics<f64> {
    let means = DMatrix::from_fn(d, c, |_, _| rng.random_range(-3.0..3.0));
    let counts = (0..c).map(|_| rng.random_range(1..50)).collect();
    ClassStatistics::from_means(means, counts)
}

/// Random SPD matrix `G Gᵀ + 0.1 I`.
pub fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let g = gaussian(rng, d, d);
    &g * g.transpose() + DMatrix::identity(d, d) * 0.1
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

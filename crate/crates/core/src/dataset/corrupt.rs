use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DatasetError, LabeledDataset};
use crate::Scalar;

/// `⌊fraction · count⌋`, tolerant of representation error just below an integer.
pub(crate) fn budget(fraction: f64, count: usize) -> usize {
    ((fraction * count as f64) + 1e-9).floor() as usize
}

/// Salt-and-pepper corruption of selected classes.
///
/// In each target class, `⌊sample_fraction · n_i⌋` samples are picked without
/// replacement; in each picked sample, `⌊pixel_fraction · d⌋` features are
/// picked without replacement and set to the dataset-wide feature minimum or
/// maximum with equal probability. Everything else is copied unchanged.
pub fn corrupt_salt_pepper<T: Scalar>(
    data: &LabeledDataset<T>,
    target_classes: &[usize],
    sample_fraction: f64,
    pixel_fraction: f64,
    seed: u64,
) -> Result<LabeledDataset<T>, DatasetError> {
    for f in [sample_fraction, pixel_fraction] {
        if !(0.0..=1.0).contains(&f) {
            return Err(DatasetError::InvalidFraction(f));
        }
    }
    if let Some(&bad) = target_classes.iter().find(|&&c| c >= data.class_count()) {
        return Err(DatasetError::UnknownClass(bad));
    }
    let mut targets = target_classes.to_vec();
    targets.sort_unstable();
    targets.dedup();

    let x = data.features();
    let low = x.min();
    let high = x.max();
    let d = data.dim();
    let per_sample = budget(pixel_fraction, d);
    let groups = data.class_indices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = x.clone();
    for class in targets {
        let members = &groups[class];
        let chosen = budget(sample_fraction, members.len());
        for pick in sample(&mut rng, members.len(), chosen) {
            let j = members[pick];
            for k in sample(&mut rng, d, per_sample) {
                out[(k, j)] = if rng.random_bool(0.5) { high } else { low };
            }
        }
    }
    data.with_features(out)
}

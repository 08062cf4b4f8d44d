use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::BinaryLabels;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::seeded;

/// Duplicates randomly chosen minority-class rows (uniform, with replacement)
/// until both classes have the same count. Original rows keep their order;
/// the copies are appended after them.
pub fn random_oversample(
    features: &Matrix,
    labels: &BinaryLabels,
    seed: u64,
) -> Result<(Matrix, BinaryLabels)> {
    if features.rows() != labels.len() {
        return Err(Error::Shape {
            expected: features.rows(),
            found: labels.len(),
        });
    }
    labels.require_both_classes()?;
    let (pos, neg) = (labels.positives(), labels.negatives());
    let minority_class = pos < neg;
    let minority: Vec<usize> = labels
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == minority_class)
        .map(|(i, _)| i)
        .collect();
    let deficit = pos.abs_diff(neg);

    let mut rng = seeded(seed);
    let mut out = features.clone();
    let mut out_labels = labels.0.clone();
    for _ in 0..deficit {
        let src = minority[rng.random_range(0..minority.len())];
        out.push_row(features.row(src))?;
        out_labels.push(minority_class);
    }
    Ok((out, BinaryLabels(out_labels)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Per class, `floor(count * test_fraction)` rows go to the test set after a
/// seeded shuffle; the rest go to training. Both index lists are sorted.
pub fn stratified_split(
    row_count: usize,
    labels: &BinaryLabels,
    test_fraction: f64,
    seed: u64,
) -> Result<SplitIndices> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    if row_count != labels.len() {
        return Err(Error::Shape {
            expected: row_count,
            found: labels.len(),
        });
    }
    labels.require_both_classes()?;

    let mut rng = seeded(seed);
    let mut train = Vec::with_capacity(row_count);
    let mut test = Vec::new();
    // positive class first, then negative: fixes the RNG consumption order
    for class in [true, false] {
        let mut members: Vec<usize> = (0..row_count)
            .filter(|&i| labels.as_slice()[i] == class)
            .collect();
        members.shuffle(&mut rng);
        let n_test = (members.len() as f64 * test_fraction).floor() as usize;
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test, seed })
}

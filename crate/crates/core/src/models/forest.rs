//! Random forest and extremely randomized trees.

use rand::Rng as _;
use rayon::prelude::*;

use super::config::ForestConfig;
use super::tree::{ClassifierBuilder, ThresholdRule, Tree};
use crate::dataset::BinaryLabels;
use crate::rng::{derive_seed, seeded};

pub(crate) const FOREST_STREAM: u64 = 0x666f_7265_7374;
pub(crate) const EXTRA_STREAM: u64 = 0x0065_7874_7261;

/// Fits `config.n_trees` trees. Tree `t` draws all of its randomness
/// (bootstrap rows first, then split choices) from a generator seeded by
/// `derive_seed(seed, stream, t)`, so any parallel schedule yields the same
/// forest.
pub(crate) fn fit(
    columns: &[Vec<f64>],
    labels: &BinaryLabels,
    config: &ForestConfig,
    rule: ThresholdRule,
    stream: u64,
    seed: u64,
) -> Vec<Tree> {
    let n = labels.len();
    let tree_config = config.tree();
    (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(derive_seed(seed, stream, t as u64));
            let weights = config.bootstrap.then(|| {
                let mut counts = vec![0u32; n];
                for _ in 0..n {
                    counts[rng.random_range(0..n)] += 1;
                }
                counts
            });
            ClassifierBuilder {
                columns,
                labels: labels.as_slice(),
                weights: weights.as_deref(),
                config: &tree_config,
                rule,
            }
            .build(&mut rng)
        })
        .collect()
}

/// Mean of the member trees' leaf values.
pub(crate) fn score_row(trees: &[Tree], row: &[f64]) -> f64 {
    trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / trees.len() as f64
}

//! Gradient boosting with logistic loss.

use super::config::BoostingConfig;
use super::logistic::sigmoid;
use super::tree::{RegressionBuilder, Tree};
use crate::dataset::BinaryLabels;
use crate::error::{Error, Result};

pub const HESSIAN_EPSILON: f64 = 1e-12;

pub(crate) struct Boosted {
    pub initial_score: f64,
    pub trees: Vec<Tree>,
}

/// Starts from the log-odds of the positive rate, then fits each stage to
/// the residuals `y - sigmoid(F)` and adds `learning_rate * tree` to `F`.
pub(crate) fn fit(
    columns: &[Vec<f64>],
    labels: &BinaryLabels,
    config: &BoostingConfig,
) -> Result<Boosted> {
    labels.require_both_classes()?;
    let n = labels.len();
    let p = labels.positives() as f64 / n as f64;
    let initial_score = (p / (1.0 - p)).ln();
    let targets: Vec<f64> = labels
        .as_slice()
        .iter()
        .map(|&l| if l { 1.0 } else { 0.0 })
        .collect();

    let mut raw = vec![initial_score; n];
    let mut residuals = vec![0.0; n];
    let mut hessians = vec![0.0; n];
    let mut trees = Vec::with_capacity(config.n_stages);
    let mut row = vec![0.0; columns.len()];
    for stage in 0..config.n_stages {
        for i in 0..n {
            let prob = sigmoid(raw[i]);
            residuals[i] = targets[i] - prob;
            hessians[i] = residuals[i].abs() * (1.0 - residuals[i].abs());
        }
        let tree = RegressionBuilder {
            columns,
            residuals: &residuals,
            hessians: &hessians,
            max_depth: config.stage_max_depth,
            min_samples_split: config.min_samples_split,
            epsilon: HESSIAN_EPSILON,
        }
        .build();
        for (i, f) in raw.iter_mut().enumerate() {
            for (j, c) in columns.iter().enumerate() {
                row[j] = c[i];
            }
            *f += config.learning_rate * tree.predict_row(&row);
            if !f.is_finite() {
                return Err(Error::Diverged(format!(
                    "boosting score not finite at stage {stage}"
                )));
            }
        }
        trees.push(tree);
    }
    Ok(Boosted {
        initial_score,
        trees,
    })
}

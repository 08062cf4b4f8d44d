//! Five binary classifiers behind one fitted-model type.
//!
//! Every classifier scores rows with the probability of the positive
//! (seizure) class. Models are immutable once trained and serialize to a
//! versioned JSON document that reproduces predictions bit for bit.

mod boosting;
mod config;
mod forest;
mod logistic;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use boosting::HESSIAN_EPSILON;
pub use config::{BoostingConfig, ForestConfig, LogisticConfig, MaxFeatures, TreeConfig};
pub use logistic::{loss_and_gradient, sigmoid, LossGradient};
pub use tree::{gini_impurity, Tree, TreeNode};

use crate::dataset::BinaryLabels;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, seeded};
use tree::{ClassifierBuilder, ThresholdRule};

pub const MODEL_FORMAT_VERSION: u32 = 1;

const SINGLE_TREE_STREAM: u64 = 0x7472_6565;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    LogisticRegression,
    DecisionTree,
    RandomForest,
    ExtraTrees,
    GradientBoosting,
}

impl ModelKind {
    /// Report order: the linear baseline first, the ensembles last.
    pub const ALL: [ModelKind; 5] = [
        ModelKind::LogisticRegression,
        ModelKind::GradientBoosting,
        ModelKind::DecisionTree,
        ModelKind::RandomForest,
        ModelKind::ExtraTrees,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::LogisticRegression => "logistic_regression",
            ModelKind::DecisionTree => "decision_tree",
            ModelKind::RandomForest => "random_forest",
            ModelKind::ExtraTrees => "extra_trees",
            ModelKind::GradientBoosting => "gradient_boosting",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::LogisticRegression => "Logistic Regression",
            ModelKind::DecisionTree => "Decision Tree",
            ModelKind::RandomForest => "Random Forest",
            ModelKind::ExtraTrees => "Extra Trees",
            ModelKind::GradientBoosting => "Gradient Boosting",
        }
    }

    pub fn default_config(self) -> TrainConfig {
        match self {
            ModelKind::LogisticRegression => TrainConfig::Logistic(LogisticConfig::default()),
            ModelKind::DecisionTree => TrainConfig::Tree(TreeConfig::default()),
            ModelKind::RandomForest => TrainConfig::Forest(ForestConfig::random_forest()),
            ModelKind::ExtraTrees => TrainConfig::Forest(ForestConfig::extra_trees()),
            ModelKind::GradientBoosting => TrainConfig::Boosting(BoostingConfig::default()),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match key.as_str() {
            "logistic_regression" | "lr" => ModelKind::LogisticRegression,
            "decision_tree" | "dt" => ModelKind::DecisionTree,
            "random_forest" | "rf" => ModelKind::RandomForest,
            "extra_trees" | "et" => ModelKind::ExtraTrees,
            "gradient_boosting" | "gb" => ModelKind::GradientBoosting,
            _ => return Err(Error::InvalidParameter(format!("unknown model kind {s:?}"))),
        })
    }
}

/// Hyperparameters for one training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrainConfig {
    Logistic(LogisticConfig),
    Tree(TreeConfig),
    Forest(ForestConfig),
    Boosting(BoostingConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    LogisticRegression {
        config: LogisticConfig,
        weights: Vec<f64>,
        bias: f64,
    },
    DecisionTree {
        config: TreeConfig,
        tree: Tree,
    },
    RandomForest {
        config: ForestConfig,
        trees: Vec<Tree>,
    },
    ExtraTrees {
        config: ForestConfig,
        trees: Vec<Tree>,
    },
    GradientBoosting {
        config: BoostingConfig,
        initial_score: f64,
        trees: Vec<Tree>,
    },
}

/// A fitted classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    pub format_version: u32,
    pub seed: u64,
    pub n_features: usize,
    pub model: ModelParams,
}

fn check_training_input(x: &Matrix, y: &BinaryLabels) -> Result<()> {
    if x.is_empty() || x.cols() == 0 {
        return Err(Error::Empty {
            what: "training matrix",
        });
    }
    if x.rows() != y.len() {
        return Err(Error::Shape {
            expected: x.rows(),
            found: y.len(),
        });
    }
    Ok(())
}

pub fn train_logistic_regression(
    x: &Matrix,
    y: &BinaryLabels,
    config: &LogisticConfig,
    seed: u64,
) -> Result<TrainedClassifier> {
    check_training_input(x, y)?;
    y.require_both_classes()?;
    config.validate()?;
    let (weights, bias) = logistic::fit(x, y, config)?;
    Ok(TrainedClassifier::new(
        seed,
        x.cols(),
        ModelParams::LogisticRegression {
            config: *config,
            weights,
            bias,
        },
    ))
}

pub fn train_decision_tree(
    x: &Matrix,
    y: &BinaryLabels,
    config: &TreeConfig,
    seed: u64,
) -> Result<TrainedClassifier> {
    check_training_input(x, y)?;
    config.validate()?;
    let columns = x.to_columns();
    let mut rng = seeded(member_seed(ModelKind::DecisionTree, seed, 0));
    let tree = ClassifierBuilder {
        columns: &columns,
        labels: y.as_slice(),
        weights: None,
        config,
        rule: ThresholdRule::Midpoints,
    }
    .build(&mut rng);
    Ok(TrainedClassifier::new(
        seed,
        x.cols(),
        ModelParams::DecisionTree {
            config: *config,
            tree,
        },
    ))
}

pub fn train_random_forest(
    x: &Matrix,
    y: &BinaryLabels,
    config: &ForestConfig,
    seed: u64,
) -> Result<TrainedClassifier> {
    check_training_input(x, y)?;
    config.validate()?;
    let trees = forest::fit(
        &x.to_columns(),
        y,
        config,
        ThresholdRule::Midpoints,
        forest::FOREST_STREAM,
        seed,
    );
    Ok(TrainedClassifier::new(
        seed,
        x.cols(),
        ModelParams::RandomForest {
            config: *config,
            trees,
        },
    ))
}

pub fn train_extra_trees(
    x: &Matrix,
    y: &BinaryLabels,
    config: &ForestConfig,
    seed: u64,
) -> Result<TrainedClassifier> {
    check_training_input(x, y)?;
    config.validate()?;
    let trees = forest::fit(
        &x.to_columns(),
        y,
        config,
        ThresholdRule::Random,
        forest::EXTRA_STREAM,
        seed,
    );
    Ok(TrainedClassifier::new(
        seed,
        x.cols(),
        ModelParams::ExtraTrees {
            config: *config,
            trees,
        },
    ))
}

pub fn train_gradient_boosting(
    x: &Matrix,
    y: &BinaryLabels,
    config: &BoostingConfig,
    seed: u64,
) -> Result<TrainedClassifier> {
    check_training_input(x, y)?;
    config.validate()?;
    let fitted = boosting::fit(&x.to_columns(), y, config)?;
    Ok(TrainedClassifier::new(
        seed,
        x.cols(),
        ModelParams::GradientBoosting {
            config: *config,
            initial_score: fitted.initial_score,
            trees: fitted.trees,
        },
    ))
}

/// Seed of the generator that drives tree `index` of a model trained with
/// master seed `seed`. Logistic regression and boosting are deterministic
/// and draw nothing.
pub fn member_seed(kind: ModelKind, seed: u64, index: usize) -> u64 {
    let stream = match kind {
        ModelKind::RandomForest => forest::FOREST_STREAM,
        ModelKind::ExtraTrees => forest::EXTRA_STREAM,
        _ => SINGLE_TREE_STREAM,
    };
    derive_seed(seed, stream, index as u64)
}

/// Trains `kind`, using `config` when given and the kind's defaults otherwise.
pub fn train(
    kind: ModelKind,
    x: &Matrix,
    y: &BinaryLabels,
    config: Option<&TrainConfig>,
    seed: u64,
) -> Result<TrainedClassifier> {
    let config = config.copied().unwrap_or_else(|| kind.default_config());
    match (kind, config) {
        (ModelKind::LogisticRegression, TrainConfig::Logistic(c)) => {
            train_logistic_regression(x, y, &c, seed)
        }
        (ModelKind::DecisionTree, TrainConfig::Tree(c)) => train_decision_tree(x, y, &c, seed),
        (ModelKind::RandomForest, TrainConfig::Forest(c)) => train_random_forest(x, y, &c, seed),
        (ModelKind::ExtraTrees, TrainConfig::Forest(c)) => train_extra_trees(x, y, &c, seed),
        (ModelKind::GradientBoosting, TrainConfig::Boosting(c)) => {
            train_gradient_boosting(x, y, &c, seed)
        }
        (kind, _) => Err(Error::InvalidParameter(format!(
            "configuration does not match model kind {kind}"
        ))),
    }
}

impl TrainedClassifier {
    fn new(seed: u64, n_features: usize, model: ModelParams) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            seed,
            n_features,
            model,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.model {
            ModelParams::LogisticRegression { .. } => ModelKind::LogisticRegression,
            ModelParams::DecisionTree { .. } => ModelKind::DecisionTree,
            ModelParams::RandomForest { .. } => ModelKind::RandomForest,
            ModelParams::ExtraTrees { .. } => ModelKind::ExtraTrees,
            ModelParams::GradientBoosting { .. } => ModelKind::GradientBoosting,
        }
    }

    pub fn config(&self) -> TrainConfig {
        match &self.model {
            ModelParams::LogisticRegression { config, .. } => TrainConfig::Logistic(*config),
            ModelParams::DecisionTree { config, .. } => TrainConfig::Tree(*config),
            ModelParams::RandomForest { config, .. } | ModelParams::ExtraTrees { config, .. } => {
                TrainConfig::Forest(*config)
            }
            ModelParams::GradientBoosting { config, .. } => TrainConfig::Boosting(*config),
        }
    }

    /// Member trees of the ensemble (or the single tree); empty for logistic regression.
    pub fn trees(&self) -> &[Tree] {
        match &self.model {
            ModelParams::LogisticRegression { .. } => &[],
            ModelParams::DecisionTree { tree, .. } => std::slice::from_ref(tree),
            ModelParams::RandomForest { trees, .. }
            | ModelParams::ExtraTrees { trees, .. }
            | ModelParams::GradientBoosting { trees, .. } => trees,
        }
    }

    fn score_row(&self, row: &[f64]) -> f64 {
        match &self.model {
            ModelParams::LogisticRegression { weights, bias, .. } => {
                sigmoid(bias + row.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>())
            }
            ModelParams::DecisionTree { tree, .. } => tree.predict_row(row),
            ModelParams::RandomForest { trees, .. } | ModelParams::ExtraTrees { trees, .. } => {
                forest::score_row(trees, row)
            }
            ModelParams::GradientBoosting {
                config,
                initial_score,
                trees,
            } => sigmoid(boosted_raw(
                *initial_score,
                config.learning_rate,
                trees,
                row,
            )),
        }
    }

    fn check_width(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.n_features {
            return Err(Error::Shape {
                expected: self.n_features,
                found: x.cols(),
            });
        }
        Ok(())
    }

    /// Probability of the positive class for each row.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.check_width(x)?;
        Ok(x.iter_rows().map(|row| self.score_row(row)).collect())
    }

    /// Positive iff the score is at least `threshold`.
    pub fn predict(&self, x: &Matrix, threshold: f64) -> Result<BinaryLabels> {
        Ok(BinaryLabels(
            self.predict_proba(x)?
                .into_iter()
                .map(|s| s >= threshold)
                .collect(),
        ))
    }

    /// For boosting models, the raw score `F` of every row after each stage,
    /// starting with the constant initial score (`n_stages + 1` entries).
    pub fn staged_raw_scores(&self, x: &Matrix) -> Result<Vec<Vec<f64>>> {
        self.check_width(x)?;
        let ModelParams::GradientBoosting {
            config,
            initial_score,
            trees,
        } = &self.model
        else {
            return Err(Error::InvalidParameter(format!(
                "{} has no boosting stages",
                self.kind()
            )));
        };
        let mut current = vec![*initial_score; x.rows()];
        let mut stages = vec![current.clone()];
        for tree in trees {
            for (f, row) in current.iter_mut().zip(x.iter_rows()) {
                *f += config.learning_rate * tree.predict_row(row);
            }
            stages.push(current.clone());
        }
        Ok(stages)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: TrainedClassifier = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                expected: MODEL_FORMAT_VERSION,
                found: self.format_version,
            });
        }
        if let ModelParams::LogisticRegression { weights, .. } = &self.model {
            if weights.len() != self.n_features {
                return Err(Error::Shape {
                    expected: self.n_features,
                    found: weights.len(),
                });
            }
        }
        let too_wide = self
            .trees()
            .iter()
            .filter_map(Tree::max_feature)
            .any(|f| f >= self.n_features);
        if too_wide {
            return Err(Error::InvalidParameter(
                "tree references a feature beyond the model width".into(),
            ));
        }
        if matches!(
            self.model,
            ModelParams::RandomForest { .. } | ModelParams::ExtraTrees { .. }
        ) && self.trees().is_empty()
        {
            return Err(Error::InvalidParameter("ensemble has no trees".into()));
        }
        Ok(())
    }
}

fn boosted_raw(initial: f64, learning_rate: f64, trees: &[Tree], row: &[f64]) -> f64 {
    trees
        .iter()
        .fold(initial, |f, t| f + learning_rate * t.predict_row(row))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable_1d() -> (Matrix, BinaryLabels) {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..50 {
            rows.push([-1.0]);
            labels.push(false);
            rows.push([1.0]);
            labels.push(true);
        }
        (Matrix::from_rows(&rows).unwrap(), BinaryLabels(labels))
    }

    fn accuracy(model: &TrainedClassifier, x: &Matrix, y: &BinaryLabels) -> f64 {
        let p = model.predict(x, 0.5).unwrap();
        p.0.iter().zip(&y.0).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
    }

    #[test]
    fn logistic_separates_one_dimensional_data() {
        let (x, y) = separable_1d();
        let m = train_logistic_regression(&x, &y, &LogisticConfig::default(), 0).unwrap();
        assert_eq!(accuracy(&m, &x, &y), 1.0);
    }

    #[test]
    fn zero_weights_score_one_half() {
        let m = TrainedClassifier::new(
            0,
            3,
            ModelParams::LogisticRegression {
                config: LogisticConfig::default(),
                weights: vec![0.0; 3],
                bias: 0.0,
            },
        );
        let x = Matrix::from_rows(&[[1.0, -2.0, 3.0], [9.0, 9.0, 9.0]]).unwrap();
        assert_eq!(m.predict_proba(&x).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn predict_threshold_is_inclusive() {
        let m = TrainedClassifier::new(
            0,
            1,
            ModelParams::DecisionTree {
                config: TreeConfig::default(),
                tree: serde_json::from_str(
                    r#"{"feature":[0,0,-1,-1,-1],"threshold":[0.5,0.25,0,0,0],
                        "left":[1,2,-1,-1,-1],"right":[4,3,-1,-1,-1],
                        "value":[0,0,0.4,0.5,0.6],"samples":[0,0,1,1,1]}"#,
                )
                .unwrap(),
            },
        );
        let x = Matrix::from_rows(&[[0.0], [0.3], [0.9]]).unwrap();
        assert_eq!(m.predict_proba(&x).unwrap(), vec![0.4, 0.5, 0.6]);
        assert_eq!(m.predict(&x, 0.5).unwrap().0, vec![false, true, true]);
        assert_eq!(m.predict(&x, 0.0).unwrap().0, vec![true; 3]);
        assert_eq!(m.predict(&x, 1.0).unwrap().0, vec![false; 3]);
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let (x, y) = separable_1d();
        let m = train_decision_tree(&x, &y, &TreeConfig::default(), 0).unwrap();
        assert!(matches!(
            m.predict_proba(&Matrix::zeros(2, 3)),
            Err(Error::Shape {
                expected: 1,
                found: 3
            })
        ));
    }

    #[test]
    fn forest_of_unanimous_leaves_scores_one() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]]).unwrap();
        let y = BinaryLabels(vec![true; 3]);
        for kind in [
            ModelKind::RandomForest,
            ModelKind::ExtraTrees,
            ModelKind::DecisionTree,
        ] {
            let m = train(kind, &x, &y, None, 3).unwrap();
            assert!(m.predict_proba(&x).unwrap().iter().all(|&s| s == 1.0));
        }
    }

    #[test]
    fn boosting_starts_at_log_odds() {
        let (x, y) = separable_1d();
        let config = BoostingConfig {
            n_stages: 0,
            ..Default::default()
        };
        let m = train_gradient_boosting(&x, &y, &config, 0).unwrap();
        assert_eq!(m.predict_proba(&x).unwrap(), vec![0.5; 100]);

        let skewed = BinaryLabels((0..100).map(|i| i < 25).collect());
        let m = train_gradient_boosting(&x, &skewed, &config, 0).unwrap();
        let ModelParams::GradientBoosting { initial_score, .. } = m.model else {
            unreachable!()
        };
        assert!((initial_score - (1.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!(m
            .predict_proba(&x)
            .unwrap()
            .iter()
            .all(|&s| (s - 0.25).abs() < 1e-15));
    }

    #[test]
    fn single_class_is_rejected_where_undefined() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let y = BinaryLabels(vec![false, false]);
        assert!(train(ModelKind::LogisticRegression, &x, &y, None, 0).is_err());
        assert!(train(ModelKind::GradientBoosting, &x, &y, None, 0).is_err());
        assert!(train(
            ModelKind::DecisionTree,
            &Matrix::zeros(0, 1),
            &BinaryLabels::default(),
            None,
            0
        )
        .is_err());
    }

    #[test]
    fn mismatched_config_is_rejected() {
        let (x, y) = separable_1d();
        let cfg = TrainConfig::Tree(TreeConfig::default());
        assert!(train(ModelKind::RandomForest, &x, &y, Some(&cfg), 0).is_err());
    }

    #[test]
    fn kind_names_parse() {
        for kind in ModelKind::ALL {
            assert_eq!(kind.as_str().parse::<ModelKind>().unwrap(), kind);
        }
        assert_eq!("ET".parse::<ModelKind>().unwrap(), ModelKind::ExtraTrees);
        assert!("svm".parse::<ModelKind>().is_err());
    }

    #[test]
    fn rejects_unknown_format_version() {
        let (x, y) = separable_1d();
        let m = train_decision_tree(&x, &y, &TreeConfig::default(), 0).unwrap();
        let json = m
            .to_json()
            .unwrap()
            .replace("\"format_version\":1", "\"format_version\":9");
        assert!(matches!(
            TrainedClassifier::from_json(&json),
            Err(Error::FormatVersion { found: 9, .. })
        ));
    }
}

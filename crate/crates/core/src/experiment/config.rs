use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    BoostingConfig, ForestConfig, LogisticConfig, ModelKind, TrainConfig, TreeConfig,
};
use crate::preprocess::Normalization;

pub const DEFAULT_SEED: u64 = 42;

/// Order of preprocessing relative to the train/test split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineMode {
    /// normalize, repair outliers and oversample the whole dataset, then split
    #[default]
    Paper,
    /// split first; fit every transform on the training rows only and
    /// oversample only the training rows
    Sound,
}

impl std::str::FromStr for PipelineMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(Self::Paper),
            "sound" => Ok(Self::Sound),
            _ => Err(Error::Config(format!(
                "unknown mode {s:?} (expected paper or sound)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub dataset_path: PathBuf,
    pub has_header: bool,
    pub mode: PipelineMode,
    pub seed: u64,
    pub test_fraction: f64,
    pub iqr_k: f64,
    pub normalization: Normalization,
    pub models: Vec<ModelKind>,
    pub logistic_regression: LogisticConfig,
    pub decision_tree: TreeConfig,
    pub random_forest: ForestConfig,
    pub extra_trees: ForestConfig,
    pub gradient_boosting: BoostingConfig,
}

impl ExperimentConfig {
    pub fn new(dataset_path: impl Into<PathBuf>) -> Self {
        Self {
            dataset_path: dataset_path.into(),
            has_header: true,
            mode: PipelineMode::Paper,
            seed: DEFAULT_SEED,
            test_fraction: 0.2,
            iqr_k: 1.5,
            normalization: Normalization::MinMax,
            models: ModelKind::ALL.to_vec(),
            logistic_regression: LogisticConfig::default(),
            decision_tree: TreeConfig::default(),
            random_forest: ForestConfig::random_forest(),
            extra_trees: ForestConfig::extra_trees(),
            gradient_boosting: BoostingConfig::default(),
        }
    }

    pub fn train_config(&self, kind: ModelKind) -> TrainConfig {
        match kind {
            ModelKind::LogisticRegression => TrainConfig::Logistic(self.logistic_regression),
            ModelKind::DecisionTree => TrainConfig::Tree(self.decision_tree),
            ModelKind::RandomForest => TrainConfig::Forest(self.random_forest),
            ModelKind::ExtraTrees => TrainConfig::Forest(self.extra_trees),
            ModelKind::GradientBoosting => TrainConfig::Boosting(self.gradient_boosting),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        if !(self.iqr_k >= 0.0 && self.iqr_k.is_finite()) {
            return Err(Error::Config(format!(
                "iqr_k must be >= 0, got {}",
                self.iqr_k
            )));
        }
        self.logistic_regression.validate()?;
        self.decision_tree.validate()?;
        self.random_forest.validate()?;
        self.extra_trees.validate()?;
        self.gradient_boosting.validate()
    }

    /// Reads a TOML config file. Keys mirror the struct fields; per-model
    /// tables (`[random_forest]` and so on) override only the keys they set.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: FileConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut config = Self::new(file.data.unwrap_or_default());
        if let Some(v) = file.has_header {
            config.has_header = v;
        }
        if let Some(v) = file.mode {
            config.mode = v;
        }
        if let Some(v) = file.seed {
            config.seed = v;
        }
        if let Some(v) = file.test_fraction {
            config.test_fraction = v;
        }
        if let Some(v) = file.iqr_k {
            config.iqr_k = v;
        }
        if let Some(v) = file.normalization {
            config.normalization = v;
        }
        if let Some(names) = file.models {
            config.models = parse_models(names.iter().map(String::as_str))?;
        }
        overlay(&mut config.logistic_regression, file.logistic_regression)?;
        overlay(&mut config.decision_tree, file.decision_tree)?;
        overlay(&mut config.random_forest, file.random_forest)?;
        overlay(&mut config.extra_trees, file.extra_trees)?;
        overlay(&mut config.gradient_boosting, file.gradient_boosting)?;
        config.validate()?;
        Ok(config)
    }
}

/// Parses model names, dropping duplicates and keeping first-seen order.
pub fn parse_models<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Vec<ModelKind>> {
    let mut out = Vec::new();
    for name in names {
        let kind: ModelKind = name
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    data: Option<PathBuf>,
    has_header: Option<bool>,
    mode: Option<PipelineMode>,
    seed: Option<u64>,
    test_fraction: Option<f64>,
    iqr_k: Option<f64>,
    normalization: Option<Normalization>,
    models: Option<Vec<String>>,
    logistic_regression: Option<toml::Table>,
    decision_tree: Option<toml::Table>,
    random_forest: Option<toml::Table>,
    extra_trees: Option<toml::Table>,
    gradient_boosting: Option<toml::Table>,
}

fn overlay<T: Serialize + DeserializeOwned>(
    target: &mut T,
    table: Option<toml::Table>,
) -> Result<()> {
    let Some(table) = table else {
        return Ok(());
    };
    let mut base = toml::Table::try_from(&*target).map_err(|e| Error::Config(e.to_string()))?;
    base.extend(table);
    *target = base
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    Ok(())
}

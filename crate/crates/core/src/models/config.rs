use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of features considered at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    #[default]
    All,
    /// `max(1, floor(sqrt(n_features)))`
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => ((n_features as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::Count(k) => k.clamp(1, n_features.max(1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 1000,
            l2: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeConfig {
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
            max_features: MaxFeatures::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
}

impl ForestConfig {
    pub fn random_forest() -> Self {
        Self {
            n_trees: 100,
            bootstrap: true,
            max_depth: None,
            min_samples_split: 2,
            max_features: MaxFeatures::Sqrt,
        }
    }

    pub fn extra_trees() -> Self {
        Self {
            bootstrap: false,
            ..Self::random_forest()
        }
    }

    pub fn tree(&self) -> TreeConfig {
        TreeConfig {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            max_features: self.max_features,
        }
    }
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self::random_forest()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostingConfig {
    pub n_stages: usize,
    pub learning_rate: f64,
    pub stage_max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for BoostingConfig {
    fn default() -> Self {
        Self {
            n_stages: 100,
            learning_rate: 0.1,
            stage_max_depth: 3,
            min_samples_split: 2,
        }
    }
}

fn positive_rate(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn positive_count(name: &str, v: usize) -> Result<()> {
    if v > 0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive")))
    }
}

impl LogisticConfig {
    pub fn validate(&self) -> Result<()> {
        positive_rate("learning_rate", self.learning_rate)?;
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "l2 must be >= 0, got {}",
                self.l2
            )));
        }
        Ok(())
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        positive_count("min_samples_split", self.min_samples_split)?;
        if let MaxFeatures::Count(k) = self.max_features {
            positive_count("max_features", k)?;
        }
        Ok(())
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        positive_count("n_trees", self.n_trees)?;
        self.tree().validate()
    }
}

impl BoostingConfig {
    pub fn validate(&self) -> Result<()> {
        positive_rate("learning_rate", self.learning_rate)?;
        positive_count("stage_max_depth", self.stage_max_depth)?;
        positive_count("min_samples_split", self.min_samples_split)
    }
}

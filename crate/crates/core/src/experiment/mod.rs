//! End-to-end benchmark: preprocessing, a shared train/test split, training
//! of every requested model, evaluation, and report files.

mod config;
mod report;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{parse_models, ExperimentConfig, PipelineMode, DEFAULT_SEED};
pub use report::{
    emit_report, save_models, Artifacts, ExperimentReport, ModelResult, Provenance, ReportFormat,
    REPORT_SCHEMA,
};

use crate::dataset::{binarize_labels, load_csv, summarize, BinaryLabels, EdaSummary, RawDataset};
use crate::error::{Result, Stage, StageExt};
use crate::matrix::Matrix;
use crate::metrics::{classification_metrics, confusion_matrix, roc_curve};
use crate::models::{self, ModelKind, TrainedClassifier};
use crate::preprocess::{
    compute_correlation_matrix, random_oversample, stratified_split, CorrelationMatrix,
    FittedNormalizer, Normalization, OutlierFences, OutlierReport,
};
use crate::rng::derive_seed;

const OVERSAMPLE_STREAM: u64 = 1;
const SPLIT_STREAM: u64 = 2;
const MODEL_STREAM: u64 = 3;

/// Fitted feature transforms, applied in order: normalize, then repair outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub format_version: u32,
    pub normalizer: FittedNormalizer,
    pub fences: OutlierFences,
}

impl Preprocessor {
    pub fn fit(features: &Matrix, normalization: Normalization, iqr_k: f64) -> Result<Self> {
        let normalizer = FittedNormalizer::fit(normalization, features).at(Stage::Normalize)?;
        let normalized = normalizer.apply(features).at(Stage::Normalize)?;
        let fences = OutlierFences::fit(&normalized, iqr_k).at(Stage::OutlierRepair)?;
        Ok(Self {
            format_version: 1,
            normalizer,
            fences,
        })
    }

    pub fn transform(&self, features: &Matrix) -> Result<(Matrix, OutlierReport)> {
        let normalized = self.normalizer.apply(features).at(Stage::Normalize)?;
        self.fences.apply(&normalized).at(Stage::OutlierRepair)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Seed used to train `kind` under master seed `seed`.
pub fn model_seed(seed: u64, kind: ModelKind) -> u64 {
    let index = ModelKind::ALL.iter().position(|&k| k == kind).unwrap_or(0);
    derive_seed(seed, MODEL_STREAM, index as u64)
}

/// Loads `config.dataset_path` and runs [`run_on_dataset`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let dataset = load_csv(&config.dataset_path, config.has_header).at(Stage::Load)?;
    run_on_dataset(&dataset, config)
}

struct Prepared {
    train_x: Matrix,
    train_y: BinaryLabels,
    test_x: Matrix,
    test_y: BinaryLabels,
    provenance: Provenance,
    preprocessor: Preprocessor,
    outliers: OutlierReport,
    correlation: CorrelationMatrix,
}

pub fn run_on_dataset(dataset: &RawDataset, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let prepared = match config.mode {
        PipelineMode::Paper => prepare_paper(dataset, config)?,
        PipelineMode::Sound => prepare_sound(dataset, config)?,
    };

    let mut results = Vec::with_capacity(config.models.len());
    let mut trained = Vec::with_capacity(config.models.len());
    let mut timings = Vec::with_capacity(config.models.len());
    for &kind in &config.models {
        let seed = model_seed(config.seed, kind);
        let train_config = config.train_config(kind);
        let started = Instant::now();
        let model = models::train(
            kind,
            &prepared.train_x,
            &prepared.train_y,
            Some(&train_config),
            seed,
        )
        .at(Stage::Train)?;
        timings.push((kind, started.elapsed().as_secs_f64()));
        results.push(evaluate(&model, &prepared.test_x, &prepared.test_y).at(Stage::Evaluate)?);
        trained.push(model);
    }

    Ok(ExperimentReport {
        schema: REPORT_SCHEMA.to_string(),
        config: config.clone(),
        preprocessing: prepared.provenance,
        models: results,
        artifacts: Artifacts {
            correlation: prepared.correlation,
            outliers: prepared.outliers,
            preprocessor: prepared.preprocessor,
            models: trained,
            timings,
        },
    })
}

fn evaluate(model: &TrainedClassifier, x: &Matrix, y: &BinaryLabels) -> Result<ModelResult> {
    let scores = model.predict_proba(x)?;
    let predicted = BinaryLabels(scores.iter().map(|&s| s >= 0.5).collect());
    let confusion = confusion_matrix(y, &predicted)?;
    let roc = roc_curve(y, &scores)?;
    Ok(ModelResult {
        kind: model.kind(),
        name: model.kind().display_name().to_string(),
        seed: model.seed,
        config: model.config(),
        metrics: classification_metrics(&confusion),
        confusion,
        auc: roc.auc,
        roc,
    })
}

fn class_counts(dataset: &RawDataset) -> std::collections::BTreeMap<u8, usize> {
    let mut counts = std::collections::BTreeMap::new();
    for &l in &dataset.labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    counts
}

fn prepare_paper(dataset: &RawDataset, config: &ExperimentConfig) -> Result<Prepared> {
    let preprocessor = Preprocessor::fit(&dataset.features, config.normalization, config.iqr_k)?;
    let (repaired, outliers) = preprocessor.transform(&dataset.features)?;
    let labels = binarize_labels(&dataset.labels).at(Stage::Binarize)?;
    let correlation = compute_correlation_matrix(&repaired).at(Stage::OutlierRepair)?;

    let oversample_seed = derive_seed(config.seed, OVERSAMPLE_STREAM, 0);
    let (balanced_x, balanced_y) =
        random_oversample(&repaired, &labels, oversample_seed).at(Stage::Oversample)?;
    let split_seed = derive_seed(config.seed, SPLIT_STREAM, 0);
    let split = stratified_split(
        balanced_x.rows(),
        &balanced_y,
        config.test_fraction,
        split_seed,
    )
    .at(Stage::Split)?;

    let test_y = balanced_y.select(&split.test);
    let provenance = Provenance {
        input_rows: dataset.len(),
        class_counts: class_counts(dataset),
        positives: labels.positives(),
        negatives: labels.negatives(),
        outliers_replaced: outliers.total_replaced,
        test_outliers_replaced: None,
        oversampled_rows: balanced_x.rows(),
        train_rows: split.train.len(),
        test_rows: split.test.len(),
        test_positives: test_y.positives(),
        test_negatives: test_y.negatives(),
        oversample_seed,
        split_seed,
    };
    Ok(Prepared {
        train_x: balanced_x.select_rows(&split.train),
        train_y: balanced_y.select(&split.train),
        test_x: balanced_x.select_rows(&split.test),
        test_y,
        provenance,
        preprocessor,
        outliers,
        correlation,
    })
}

fn prepare_sound(dataset: &RawDataset, config: &ExperimentConfig) -> Result<Prepared> {
    let labels = binarize_labels(&dataset.labels).at(Stage::Binarize)?;
    let split_seed = derive_seed(config.seed, SPLIT_STREAM, 0);
    let split = stratified_split(dataset.len(), &labels, config.test_fraction, split_seed)
        .at(Stage::Split)?;
    let raw_train = dataset.features.select_rows(&split.train);
    let raw_test = dataset.features.select_rows(&split.test);

    let preprocessor = Preprocessor::fit(&raw_train, config.normalization, config.iqr_k)?;
    let (train_x, outliers) = preprocessor.transform(&raw_train)?;
    let (test_x, test_outliers) = preprocessor.transform(&raw_test)?;
    let correlation = compute_correlation_matrix(&train_x).at(Stage::OutlierRepair)?;

    let train_labels = labels.select(&split.train);
    let oversample_seed = derive_seed(config.seed, OVERSAMPLE_STREAM, 0);
    let (train_x, train_y) =
        random_oversample(&train_x, &train_labels, oversample_seed).at(Stage::Oversample)?;

    let test_y = labels.select(&split.test);
    let provenance = Provenance {
        input_rows: dataset.len(),
        class_counts: class_counts(dataset),
        positives: labels.positives(),
        negatives: labels.negatives(),
        outliers_replaced: outliers.total_replaced,
        test_outliers_replaced: Some(test_outliers.total_replaced),
        oversampled_rows: train_x.rows(),
        train_rows: train_x.rows(),
        test_rows: test_x.rows(),
        test_positives: test_y.positives(),
        test_negatives: test_y.negatives(),
        oversample_seed,
        split_seed,
    };
    Ok(Prepared {
        train_x,
        train_y,
        test_x,
        test_y,
        provenance,
        preprocessor,
        outliers,
        correlation,
    })
}

/// Exploratory summary: raw class and feature statistics plus the
/// correlation matrix and outlier ledger of the preprocessed features.
#[derive(Debug, Clone, Serialize)]
pub struct EdaReport {
    pub summary: EdaSummary,
    pub positives: usize,
    pub negatives: usize,
    pub outliers: OutlierReport,
    #[serde(skip)]
    pub correlation: CorrelationMatrix,
}

pub fn exploratory_analysis(
    dataset: &RawDataset,
    normalization: Normalization,
    iqr_k: f64,
) -> Result<EdaReport> {
    let summary = summarize(dataset).at(Stage::Load)?;
    let labels = binarize_labels(&dataset.labels).at(Stage::Binarize)?;
    let preprocessor = Preprocessor::fit(&dataset.features, normalization, iqr_k)?;
    let (repaired, outliers) = preprocessor.transform(&dataset.features)?;
    let correlation = compute_correlation_matrix(&repaired).at(Stage::OutlierRepair)?;
    Ok(EdaReport {
        summary,
        positives: labels.positives(),
        negatives: labels.negatives(),
        outliers,
        correlation,
    })
}

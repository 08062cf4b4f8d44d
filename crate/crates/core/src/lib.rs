//! Seizure-vs-rest classification of one-second EEG windows.
//!
//! The crate covers the whole benchmark: CSV ingestion ([`dataset`]),
//! normalization, outlier repair, oversampling and splitting
//! ([`preprocess`]), five from-scratch classifiers ([`models`]), evaluation
//! ([`metrics`]) and the end-to-end runner ([`experiment`]).

pub mod dataset;
pub mod error;
pub mod experiment;
pub mod matrix;
pub mod metrics;
pub mod models;
pub mod preprocess;
pub mod rng;
pub mod synthetic;

pub use dataset::{BinaryLabels, RawDataset, FEATURE_COUNT};
pub use error::{Error, Result, Stage};
pub use experiment::{ExperimentConfig, ExperimentReport, PipelineMode};
pub use matrix::Matrix;
pub use metrics::{ConfusionMatrix, MetricsReport, RocCurve};
pub use models::{ModelKind, TrainConfig, TrainedClassifier};

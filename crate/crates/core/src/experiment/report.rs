use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::metrics::{ConfusionMatrix, MetricsReport, RocCurve};
use crate::models::{ModelKind, TrainConfig, TrainedClassifier};
use crate::preprocess::{CorrelationMatrix, OutlierReport};

use super::Preprocessor;

pub const REPORT_SCHEMA: &str = "seizure-report/1";

/// Row counts and seeds that pin down how the train and test sets were built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub input_rows: usize,
    /// counts of the original five labels
    pub class_counts: BTreeMap<u8, usize>,
    pub positives: usize,
    pub negatives: usize,
    /// cells repaired in the rows the fences were fitted on
    pub outliers_replaced: usize,
    /// cells repaired in the held-out rows (sound mode only)
    pub test_outliers_replaced: Option<usize>,
    pub oversampled_rows: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub test_positives: usize,
    pub test_negatives: usize,
    pub oversample_seed: u64,
    pub split_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelResult {
    pub kind: ModelKind,
    pub name: String,
    pub seed: u64,
    pub config: TrainConfig,
    pub metrics: MetricsReport,
    pub confusion: ConfusionMatrix,
    pub auc: f64,
    pub roc: RocCurve,
}

/// Run outputs that are not part of the serialized report. Training times
/// live here because they vary between runs; the report itself is a pure
/// function of the configuration.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub correlation: CorrelationMatrix,
    pub outliers: OutlierReport,
    pub preprocessor: Preprocessor,
    pub models: Vec<TrainedClassifier>,
    /// wall-clock training seconds per model
    pub timings: Vec<(ModelKind, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub config: ExperimentConfig,
    pub preprocessing: Provenance,
    pub models: Vec<ModelResult>,
    #[serde(skip)]
    pub artifacts: Artifacts,
}

impl ExperimentReport {
    pub fn result(&self, kind: ModelKind) -> Option<&ModelResult> {
        self.models.iter().find(|m| m.kind == kind)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Table of positive-class and macro metrics as percentages with two
    /// decimals, one row per model.
    pub fn metrics_csv(&self) -> String {
        let mut s = String::from(
            "model,precision,recall,f1,accuracy,macro_precision,macro_recall,macro_f1,auc,misclassified,test_size\n",
        );
        for m in &self.models {
            let r = &m.metrics;
            s.push_str(&format!(
                "{},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2},{:.4},{},{}\n",
                m.name,
                r.precision * 100.0,
                r.recall * 100.0,
                r.f1 * 100.0,
                r.accuracy * 100.0,
                r.macro_precision * 100.0,
                r.macro_recall * 100.0,
                r.macro_f1 * 100.0,
                m.auc,
                r.misclassified,
                m.confusion.total(),
            ));
        }
        s
    }

    pub fn confusion_csv(&self) -> String {
        let mut s = String::from("model,tp,fn,fp,tn\n");
        for m in &self.models {
            let c = &m.confusion;
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                m.name, c.tp, c.fn_, c.fp, c.tn
            ));
        }
        s
    }

    pub fn timings_csv(&self) -> String {
        let mut s = String::from("model,train_seconds\n");
        for (kind, secs) in &self.artifacts.timings {
            s.push_str(&format!("{},{secs:.3}\n", kind.display_name()));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// `report.json`
    Json,
    /// metrics, confusion matrices, per-model ROC points, correlation
    /// matrix, outlier ledger and training times
    Csv,
}

fn write(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes the requested formats into `out_dir` (created if missing) and
/// returns the paths written, in order.
pub fn emit_report(
    report: &ExperimentReport,
    formats: &[ReportFormat],
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if formats.contains(&ReportFormat::Json) {
        write(dir, "report.json", &report.to_json()?, &mut written)?;
    }
    if formats.contains(&ReportFormat::Csv) {
        write(dir, "metrics.csv", &report.metrics_csv(), &mut written)?;
        write(
            dir,
            "confusion_matrices.csv",
            &report.confusion_csv(),
            &mut written,
        )?;
        for m in &report.models {
            write(
                dir,
                &format!("roc_{}.csv", m.kind),
                &m.roc.to_csv(),
                &mut written,
            )?;
        }
        write(
            dir,
            "correlation.csv",
            &report.artifacts.correlation.to_csv(),
            &mut written,
        )?;
        write(
            dir,
            "outliers.csv",
            &report.artifacts.outliers.to_csv(),
            &mut written,
        )?;
        write(dir, "timings.csv", &report.timings_csv(), &mut written)?;
    }
    Ok(written)
}

/// Writes each trained model and the fitted preprocessor as JSON under `dir`.
pub fn save_models(report: &ExperimentReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for model in &report.artifacts.models {
        write(
            dir,
            &format!("{}.json", model.kind()),
            &model.to_json()?,
            &mut written,
        )?;
    }
    write(
        dir,
        "preprocessor.json",
        &report.artifacts.preprocessor.to_json()?,
        &mut written,
    )?;
    Ok(written)
}

//! Loading and summarizing the epileptic-seizure recognition CSV.
//!
//! The file layout is: an opaque row identifier, 178 EEG samples (one second
//! of signal), then an integer class label in `1..=5`. Label 1 is seizure
//! activity; 2 through 5 are the non-seizure recordings.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::preprocess::quantile_sorted;

/// Samples per EEG window.
pub const FEATURE_COUNT: usize = 178;
/// Label of the seizure recordings.
pub const SEIZURE_LABEL: u8 = 1;

/// Parsed dataset: ids are kept for provenance only and never enter computation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub row_ids: Vec<String>,
    pub features: Matrix,
    pub labels: Vec<u8>,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Seizure-vs-rest labels; `true` is the positive (seizure) class.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinaryLabels(pub Vec<bool>);

impl BinaryLabels {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.0.iter().filter(|&&p| p).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        Self(indices.iter().map(|&i| self.0[i]).collect())
    }

    /// Fails unless both classes occur at least once.
    pub fn require_both_classes(&self) -> Result<()> {
        if self.positives() == 0 {
            return Err(Error::MissingClass("positive"));
        }
        if self.negatives() == 0 {
            return Err(Error::MissingClass("negative"));
        }
        Ok(())
    }
}

impl From<Vec<bool>> for BinaryLabels {
    fn from(v: Vec<bool>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdaSummary {
    pub total_rows: usize,
    pub class_counts: BTreeMap<u8, usize>,
    pub per_feature: Vec<FeatureStats>,
}

/// Reads a dataset from `path`. Columns are parsed positionally; header text is ignored.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(BufReader::new(file), has_header)
}

pub fn read_csv<R: Read>(reader: R, has_header: bool) -> Result<RawDataset> {
    let expected = FEATURE_COUNT + 2;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_reader(reader);

    let mut row_ids = Vec::new();
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() != expected {
            return Err(Error::ColumnCount {
                row: line,
                expected,
                found: record.len(),
            });
        }
        row_ids.push(record[0].to_string());
        for column in 1..=FEATURE_COUNT {
            let cell = record[column].trim();
            let value: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                row: line,
                column,
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite { row: line, column });
            }
            data.push(value);
        }
        let cell = record[expected - 1].trim();
        let label: i64 = cell.parse().map_err(|_| Error::NonNumeric {
            row: line,
            column: expected - 1,
            value: cell.to_string(),
        })?;
        if !(1..=5).contains(&label) {
            return Err(Error::LabelOutOfRange {
                index: labels.len(),
                label,
            });
        }
        labels.push(label as u8);
    }

    if labels.is_empty() {
        return Err(Error::EmptyFile);
    }
    Ok(RawDataset {
        row_ids,
        features: Matrix::new(labels.len(), FEATURE_COUNT, data)?,
        labels,
    })
}

/// Writes `dataset` in the same layout `load_csv` reads, with a header row.
pub fn write_csv<W: Write>(dataset: &RawDataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = Vec::with_capacity(FEATURE_COUNT + 2);
    header.push(String::new());
    header.extend((1..=dataset.features.cols()).map(|i| format!("X{i}")));
    header.push("y".to_string());
    w.write_record(&header)?;
    for ((id, row), label) in dataset
        .row_ids
        .iter()
        .zip(dataset.features.iter_rows())
        .zip(&dataset.labels)
    {
        let mut record = Vec::with_capacity(row.len() + 2);
        record.push(id.clone());
        record.extend(row.iter().map(|v| v.to_string()));
        record.push(label.to_string());
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// Maps label 1 to positive and labels 2 to 5 to negative.
pub fn binarize_labels(labels: &[u8]) -> Result<BinaryLabels> {
    labels
        .iter()
        .enumerate()
        .map(|(index, &label)| match label {
            SEIZURE_LABEL => Ok(true),
            2..=5 => Ok(false),
            _ => Err(Error::LabelOutOfRange {
                index,
                label: label.into(),
            }),
        })
        .collect::<Result<Vec<_>>>()
        .map(BinaryLabels)
}

/// Class counts and per-feature order statistics.
pub fn summarize(dataset: &RawDataset) -> Result<EdaSummary> {
    if dataset.is_empty() {
        return Err(Error::Empty { what: "dataset" });
    }
    let mut class_counts = BTreeMap::new();
    for &label in &dataset.labels {
        *class_counts.entry(label).or_insert(0) += 1;
    }
    let n = dataset.len() as f64;
    let per_feature = (0..dataset.features.cols())
        .map(|j| {
            let mut column = dataset.features.column(j);
            let mean = column.iter().sum::<f64>() / n;
            column.sort_unstable_by(f64::total_cmp);
            FeatureStats {
                min: column[0],
                max: column[column.len() - 1],
                mean,
                median: quantile_sorted(&column, 0.5),
            }
        })
        .collect();
    Ok(EdaSummary {
        total_rows: dataset.len(),
        class_counts,
        per_feature,
    })
}

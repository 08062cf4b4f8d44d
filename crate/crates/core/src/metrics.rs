//! Confusion matrices, precision/recall/F1/accuracy, and ROC curves.

use serde::{Deserialize, Serialize};

use crate::dataset::BinaryLabels;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn misclassified(&self) -> u64 {
        self.fp + self.fn_
    }

    /// The same counts with the negative class treated as positive.
    pub fn swapped(&self) -> Self {
        Self {
            tp: self.tn,
            tn: self.tp,
            fp: self.fn_,
            fn_: self.fp,
        }
    }
}

/// Precision, recall and F1 of the positive class, accuracy, and the
/// macro average of precision/recall/F1 over both classes. All stored as
/// fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub misclassified: u64,
}

pub fn confusion_matrix(y_true: &BinaryLabels, y_pred: &BinaryLabels) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Shape {
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::Empty {
            what: "label sequence",
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.as_slice().iter().zip(y_pred.as_slice()) {
        match (t, p) {
            (true, true) => cm.tp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fp += 1,
            (true, false) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// `num / den`, with 0/0 defined as 0.
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn prf(cm: &ConfusionMatrix) -> (f64, f64, f64) {
    let precision = ratio(cm.tp as f64, (cm.tp + cm.fp) as f64);
    let recall = ratio(cm.tp as f64, (cm.tp + cm.fn_) as f64);
    let f1 = ratio(2.0 * precision * recall, precision + recall);
    (precision, recall, f1)
}

pub fn classification_metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let (precision, recall, f1) = prf(cm);
    let (np, nr, nf) = prf(&cm.swapped());
    MetricsReport {
        precision,
        recall,
        f1,
        accuracy: ratio((cm.tp + cm.tn) as f64, cm.total() as f64),
        macro_precision: (precision + np) / 2.0,
        macro_recall: (recall + nr) / 2.0,
        macro_f1: (f1 + nf) / 2.0,
        misclassified: cm.misclassified(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Scores at or above this value are predicted positive; `None` for the
    /// leading (0, 0) point, which predicts nothing positive.
    pub threshold: Option<f64>,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

impl RocCurve {
    /// `threshold,fpr,tpr` rows; the leading point's threshold is written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("threshold,fpr,tpr\n");
        for p in &self.points {
            match p.threshold {
                Some(t) => s.push_str(&format!("{t},{},{}\n", p.fpr, p.tpr)),
                None => s.push_str(&format!("inf,{},{}\n", p.fpr, p.tpr)),
            }
        }
        s
    }
}

/// Sweeps thresholds over the distinct scores in descending order; tied
/// scores flip together. The area is the trapezoidal rule over the points,
/// accumulated in integer counts so it equals the pairwise ranking
/// probability (ties counted one half) exactly.
pub fn roc_curve(y_true: &BinaryLabels, scores: &[f64]) -> Result<RocCurve> {
    if y_true.len() != scores.len() {
        return Err(Error::Shape {
            expected: y_true.len(),
            found: scores.len(),
        });
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::InvalidParameter(format!("score {i} is NaN")));
    }
    let positives = y_true.positives() as u64;
    let negatives = y_true.negatives() as u64;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidParameter(
            "ROC needs both classes in the ground truth".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let (pf, nf) = (positives as f64, negatives as f64);
    let mut points = vec![RocPoint {
        threshold: None,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    // twice the area, in units of (1 / positives) * (1 / negatives)
    let mut doubled_area: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let score = scores[order[i]];
        let (tp_before, fp_before) = (tp, fp);
        while i < order.len() && scores[order[i]] == score {
            if y_true.as_slice()[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        doubled_area += (fp - fp_before) as u128 * (tp + tp_before) as u128;
        points.push(RocPoint {
            threshold: Some(score),
            fpr: fp as f64 / nf,
            tpr: tp as f64 / pf,
        });
    }
    let last = points.last().copied().unwrap_or(points[0]);
    if last.fpr != 1.0 || last.tpr != 1.0 {
        points.push(RocPoint {
            threshold: None,
            fpr: 1.0,
            tpr: 1.0,
        });
    }
    let auc = doubled_area as f64 / (2.0 * positives as f64 * negatives as f64);
    Ok(RocCurve { points, auc })
}

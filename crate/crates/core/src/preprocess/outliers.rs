use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quantile_sorted;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Tukey fences `(Q1 - k*IQR, Q3 + k*IQR)` of a column.
pub fn compute_iqr_bounds(column: &[f64], k: f64) -> Result<(f64, f64)> {
    if column.is_empty() {
        return Err(Error::Empty { what: "column" });
    }
    check_k(k)?;
    let mut sorted = column.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(fences_of_sorted(&sorted, k))
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "IQR multiplier must be finite and >= 0, got {k}"
        )));
    }
    Ok(())
}

fn fences_of_sorted(sorted: &[f64], k: f64) -> (f64, f64) {
    let q1 = quantile_sorted(sorted, 0.25);
    let q3 = quantile_sorted(sorted, 0.75);
    let iqr = q3 - q1;
    (q1 - k * iqr, q3 + k * iqr)
}

/// Per-feature fences and replacement medians fitted on one matrix, applicable to others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierFences {
    pub k: f64,
    pub bounds: Vec<(f64, f64)>,
    pub medians: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub total_replaced: usize,
    pub per_feature_replaced: Vec<usize>,
    pub bounds: Vec<(f64, f64)>,
    pub medians: Vec<f64>,
}

impl OutlierFences {
    pub fn fit(features: &Matrix, k: f64) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Empty {
                what: "feature matrix",
            });
        }
        check_k(k)?;
        let (bounds, medians) = (0..features.cols())
            .into_par_iter()
            .map(|j| {
                let mut sorted = features.column(j);
                sorted.sort_unstable_by(f64::total_cmp);
                (fences_of_sorted(&sorted, k), quantile_sorted(&sorted, 0.5))
            })
            .unzip();
        Ok(Self { k, bounds, medians })
    }

    /// Replaces every cell strictly outside its feature's fences with that feature's median.
    pub fn apply(&self, features: &Matrix) -> Result<(Matrix, OutlierReport)> {
        if features.cols() != self.bounds.len() {
            return Err(Error::Shape {
                expected: self.bounds.len(),
                found: features.cols(),
            });
        }
        let mut out = features.clone();
        let mut per_feature_replaced = vec![0usize; features.cols()];
        for r in 0..out.rows() {
            for (j, x) in out.row_mut(r).iter_mut().enumerate() {
                let (lo, hi) = self.bounds[j];
                if *x < lo || *x > hi {
                    *x = self.medians[j];
                    per_feature_replaced[j] += 1;
                }
            }
        }
        let report = OutlierReport {
            total_replaced: per_feature_replaced.iter().sum(),
            per_feature_replaced,
            bounds: self.bounds.clone(),
            medians: self.medians.clone(),
        };
        Ok((out, report))
    }
}

/// Fits fences on `features` and repairs the same matrix. Medians come from
/// the columns before any replacement.
pub fn replace_outliers(features: &Matrix, k: f64) -> Result<(Matrix, OutlierReport)> {
    OutlierFences::fit(features, k)?.apply(features)
}

impl OutlierReport {
    /// CSV with one row per feature: index, lower, upper, median, replaced.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("feature,lower,upper,median,replaced\n");
        for (j, ((lo, hi), med)) in self.bounds.iter().zip(&self.medians).enumerate() {
            s.push_str(&format!(
                "X{},{lo},{hi},{med},{}\n",
                j + 1,
                self.per_feature_replaced[j]
            ));
        }
        s
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    MinMax,
    ZScore,
}

/// Column-wise min and max, as fitted by [`fit_normalizer`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizerParams {
    pub per_feature_min: Vec<f64>,
    pub per_feature_max: Vec<f64>,
}

/// Column-wise mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreParams {
    pub per_feature_mean: Vec<f64>,
    pub per_feature_std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum FittedNormalizer {
    MinMax(NormalizerParams),
    ZScore(ZScoreParams),
}

impl FittedNormalizer {
    pub fn fit(scheme: Normalization, features: &Matrix) -> Result<Self> {
        match scheme {
            Normalization::MinMax => fit_normalizer(features).map(Self::MinMax),
            Normalization::ZScore => ZScoreParams::fit(features).map(Self::ZScore),
        }
    }

    pub fn apply(&self, features: &Matrix) -> Result<Matrix> {
        match self {
            Self::MinMax(p) => apply_normalizer(p, features),
            Self::ZScore(p) => p.apply(features),
        }
    }
}

pub fn fit_normalizer(features: &Matrix) -> Result<NormalizerParams> {
    if features.is_empty() {
        return Err(Error::Empty {
            what: "feature matrix",
        });
    }
    let mut min = features.row(0).to_vec();
    let mut max = min.clone();
    for row in features.iter_rows().skip(1) {
        for ((lo, hi), &v) in min.iter_mut().zip(max.iter_mut()).zip(row) {
            *lo = lo.min(v);
            *hi = hi.max(v);
        }
    }
    Ok(NormalizerParams {
        per_feature_min: min,
        per_feature_max: max,
    })
}

/// Maps each cell to `(x - min) / (max - min)`; constant columns map to 0.
/// Values outside the fitted range are not clamped.
pub fn apply_normalizer(params: &NormalizerParams, features: &Matrix) -> Result<Matrix> {
    if features.cols() != params.per_feature_min.len() {
        return Err(Error::Shape {
            expected: params.per_feature_min.len(),
            found: features.cols(),
        });
    }
    let mut out = features.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        for (j, x) in row.iter_mut().enumerate() {
            let (lo, hi) = (params.per_feature_min[j], params.per_feature_max[j]);
            *x = if hi > lo { (*x - lo) / (hi - lo) } else { 0.0 };
        }
    }
    Ok(out)
}

impl ZScoreParams {
    pub fn fit(features: &Matrix) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Empty {
                what: "feature matrix",
            });
        }
        let n = features.rows() as f64;
        let cols = features.cols();
        let mut mean = vec![0.0; cols];
        for row in features.iter_rows() {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; cols];
        for row in features.iter_rows() {
            for ((s, &m), &v) in var.iter_mut().zip(&mean).zip(row) {
                *s += (v - m) * (v - m);
            }
        }
        Ok(Self {
            per_feature_mean: mean,
            per_feature_std: var.into_iter().map(|s| (s / n).sqrt()).collect(),
        })
    }

    /// `(x - mean) / std`; zero-variance columns map to 0.
    pub fn apply(&self, features: &Matrix) -> Result<Matrix> {
        if features.cols() != self.per_feature_mean.len() {
            return Err(Error::Shape {
                expected: self.per_feature_mean.len(),
                found: features.cols(),
            });
        }
        let mut out = features.clone();
        for r in 0..out.rows() {
            for (j, x) in out.row_mut(r).iter_mut().enumerate() {
                let sd = self.per_feature_std[j];
                *x = if sd > 0.0 {
                    (*x - self.per_feature_mean[j]) / sd
                } else {
                    0.0
                };
            }
        }
        Ok(out)
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Pearson correlations between every pair of features, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub dim: usize,
    pub values: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("feature");
        for j in 0..self.dim {
            s.push_str(&format!(",X{}", j + 1));
        }
        s.push('\n');
        for i in 0..self.dim {
            s.push_str(&format!("X{}", i + 1));
            for j in 0..self.dim {
                s.push_str(&format!(",{}", self.get(i, j)));
            }
            s.push('\n');
        }
        s
    }
}

/// Zero-variance columns correlate 0 with everything, themselves included.
pub fn compute_correlation_matrix(features: &Matrix) -> Result<CorrelationMatrix> {
    if features.rows() < 2 {
        return Err(Error::InvalidParameter(format!(
            "correlation needs at least 2 rows, got {}",
            features.rows()
        )));
    }
    let n = features.rows() as f64;
    let dim = features.cols();
    let centered: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let col = features.column(j);
            let mean = col.iter().sum::<f64>() / n;
            col.into_iter().map(|v| v - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    let upper: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|i| {
            (i..dim)
                .map(|j| {
                    if norms[i] == 0.0 || norms[j] == 0.0 {
                        0.0
                    } else if i == j {
                        1.0
                    } else {
                        let dot: f64 = centered[i]
                            .iter()
                            .zip(&centered[j])
                            .map(|(a, b)| a * b)
                            .sum();
                        (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0)
                    }
                })
                .collect()
        })
        .collect();

    let mut values = vec![0.0; dim * dim];
    for (i, row) in upper.iter().enumerate() {
        for (offset, &r) in row.iter().enumerate() {
            let j = i + offset;
            values[i * dim + j] = r;
            values[j * dim + i] = r;
        }
    }
    Ok(CorrelationMatrix { dim, values })
}

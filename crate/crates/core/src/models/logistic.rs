//! Binary logistic regression fitted by full-batch gradient descent.

use crate::dataset::BinaryLabels;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::config::LogisticConfig;

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
#[inline]
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossGradient {
    pub loss: f64,
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// Mean binary cross-entropy plus `l2/2 * |w|^2` (bias unpenalized), and its gradient.
pub fn loss_and_gradient(
    x: &Matrix,
    y: &BinaryLabels,
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> LossGradient {
    let n = x.rows() as f64;
    let mut grad = vec![0.0; weights.len()];
    let mut grad_bias = 0.0;
    let mut loss = 0.0;
    for (row, &label) in x.iter_rows().zip(y.as_slice()) {
        let z = bias + row.iter().zip(weights).map(|(a, w)| a * w).sum::<f64>();
        let target = if label { 1.0 } else { 0.0 };
        loss += softplus(z) - target * z;
        let err = sigmoid(z) - target;
        grad_bias += err;
        for (g, &a) in grad.iter_mut().zip(row) {
            *g += err * a;
        }
    }
    let penalty: f64 = weights.iter().map(|w| w * w).sum::<f64>() * l2 / 2.0;
    for (g, &w) in grad.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    LossGradient {
        loss: loss / n + penalty,
        weights: grad,
        bias: grad_bias / n,
    }
}

/// Runs `epochs` gradient steps from zero weights. Returns `(weights, bias)`.
pub(crate) fn fit(
    x: &Matrix,
    y: &BinaryLabels,
    config: &LogisticConfig,
) -> Result<(Vec<f64>, f64)> {
    let mut weights = vec![0.0; x.cols()];
    let mut bias = 0.0;
    for epoch in 0..config.epochs {
        let step = loss_and_gradient(x, y, &weights, bias, config.l2);
        if !step.loss.is_finite() {
            return Err(Error::Diverged(format!(
                "logistic loss became {} at epoch {epoch}; lower the learning rate",
                step.loss
            )));
        }
        for (w, g) in weights.iter_mut().zip(&step.weights) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * step.bias;
    }
    if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
        return Err(Error::Diverged("logistic weights are not finite".into()));
    }
    Ok((weights, bias))
}

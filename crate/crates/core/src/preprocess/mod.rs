//! Normalization, outlier repair, class balancing, splitting and the
//! feature correlation matrix.

mod correlation;
mod normalize;
mod outliers;
mod sampling;

pub use correlation::{compute_correlation_matrix, CorrelationMatrix};
pub use normalize::{
    apply_normalizer, fit_normalizer, FittedNormalizer, Normalization, NormalizerParams,
    ZScoreParams,
};
pub use outliers::{compute_iqr_bounds, replace_outliers, OutlierFences, OutlierReport};
pub use sampling::{random_oversample, stratified_split, SplitIndices};

/// Quantile of an ascending-sorted, non-empty slice by linear interpolation
/// at position `q * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

#[cfg(test)]
mod tests {
    use super::quantile_sorted;

    #[test]
    fn quantile_interpolates() {
        let v: Vec<f64> = (0..=10).map(f64::from).collect();
        assert_eq!(quantile_sorted(&v, 0.25), 2.5);
        assert_eq!(quantile_sorted(&v, 0.5), 5.0);
        assert_eq!(quantile_sorted(&[1.0, 2.0], 0.5), 1.5);
        assert_eq!(quantile_sorted(&[4.0], 0.75), 4.0);
    }
}

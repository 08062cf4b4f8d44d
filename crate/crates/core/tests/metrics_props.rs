mod common;

use common::*;
use proptest::prelude::*;
use seizure_core::metrics::{classification_metrics, confusion_matrix, roc_curve};
use seizure_core::BinaryLabels;

proptest! {
    #[test]
    fn auc_equals_pairwise_ranking_probability(seed in any::<u64>(), n in 2usize..120) {
        let (labels, scores) = tied_scores(&mut rng(seed), n);
        let roc = roc_curve(&BinaryLabels(labels.clone()), &scores).unwrap();
        prop_assert!((roc.auc - mann_whitney(&labels, &scores)).abs() <= 1e-12);
    }

    #[test]
    fn reversing_scores_complements_auc(seed in any::<u64>(), n in 2usize..120) {
        let (labels, scores) = tied_scores(&mut rng(seed), n);
        let y = BinaryLabels(labels);
        let flipped: Vec<f64> = scores.iter().map(|s| 1.0 - s).collect();
        let sum = roc_curve(&y, &scores).unwrap().auc + roc_curve(&y, &flipped).unwrap().auc;
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn auc_ignores_monotone_rescaling(seed in any::<u64>(), n in 2usize..120) {
        let (labels, scores) = tied_scores(&mut rng(seed), n);
        let y = BinaryLabels(labels);
        let base = roc_curve(&y, &scores).unwrap().auc;
        let cubed: Vec<f64> = scores.iter().map(|s| s.powi(3)).collect();
        let exp: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
        prop_assert_eq!(base, roc_curve(&y, &cubed).unwrap().auc);
        prop_assert_eq!(base, roc_curve(&y, &exp).unwrap().auc);
    }

    #[test]
    fn roc_is_monotone_from_origin_to_corner(seed in any::<u64>(), n in 2usize..120) {
        let (labels, scores) = tied_scores(&mut rng(seed), n);
        let roc = roc_curve(&BinaryLabels(labels), &scores).unwrap();
        let first = roc.points.first().unwrap();
        let last = roc.points.last().unwrap();
        prop_assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in roc.points.windows(2) {
            prop_assert!(w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
        }
    }

    #[test]
    fn metrics_stay_in_unit_interval(seed in any::<u64>(), n in 1usize..80) {
        let mut r = rng(seed);
        let truth: Vec<bool> = (0..n).map(|_| rand::Rng::random_bool(&mut r, 0.5)).collect();
        let pred: Vec<bool> = (0..n).map(|_| rand::Rng::random_bool(&mut r, 0.5)).collect();
        let cm = confusion_matrix(&BinaryLabels(truth), &BinaryLabels(pred)).unwrap();
        prop_assert_eq!(cm.total() as usize, n);
        let m = classification_metrics(&cm);
        for v in [m.precision, m.recall, m.f1, m.accuracy, m.macro_precision, m.macro_recall, m.macro_f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert_eq!(m.misclassified, cm.fp + cm.fn_);
    }
}

#[test]
fn perfect_predictions_score_one_everywhere() {
    let y = BinaryLabels(vec![true, false, true, true, false]);
    let m = classification_metrics(&confusion_matrix(&y, &y).unwrap());
    for v in [
        m.precision,
        m.recall,
        m.f1,
        m.accuracy,
        m.macro_precision,
        m.macro_recall,
        m.macro_f1,
    ] {
        assert_eq!(v, 1.0);
    }
    let scores: Vec<f64> = y
        .as_slice()
        .iter()
        .map(|&l| if l { 0.9 } else { 0.1 })
        .collect();
    assert_eq!(roc_curve(&y, &scores).unwrap().auc, 1.0);
}

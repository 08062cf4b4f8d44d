//! Binary decision trees: node storage, the CART classification builder
//! shared by the single tree, random forest and extra trees, and the
//! variance-reduction regression builder used by gradient boosting.

use std::cmp::Ordering;

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{MaxFeatures, TreeConfig};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Node sizes (samples x candidate features) below which split search stays sequential.
const PARALLEL_WORK: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreeNode {
    /// Rows with `x[feature] <= threshold` go left.
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// `value` is the positive fraction for classification trees and the
    /// additive score for boosting stages.
    Leaf { value: f64, sample_count: u64 },
}

/// Tree stored as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FlatTree", into = "FlatTree")]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => {
                    1 + walk(nodes, left).max(walk(nodes, right))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    #[inline]
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { value, .. } => return value,
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[feature] <= threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    /// Largest feature index referenced by a split, if any.
    pub(crate) fn max_feature(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Internal { feature, .. } => Some(*feature),
                TreeNode::Leaf { .. } => None,
            })
            .max()
    }
}

/// Struct-of-arrays wire form. Leaves have `feature == -1` and no children.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct FlatTree {
    feature: Vec<i64>,
    threshold: Vec<f64>,
    left: Vec<i64>,
    right: Vec<i64>,
    value: Vec<f64>,
    samples: Vec<u64>,
}

impl From<Tree> for FlatTree {
    fn from(tree: Tree) -> Self {
        let n = tree.nodes.len();
        let mut flat = FlatTree {
            feature: Vec::with_capacity(n),
            threshold: Vec::with_capacity(n),
            left: Vec::with_capacity(n),
            right: Vec::with_capacity(n),
            value: Vec::with_capacity(n),
            samples: Vec::with_capacity(n),
        };
        for node in tree.nodes {
            let (f, t, l, r, v, s) = match node {
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => (feature as i64, threshold, left as i64, right as i64, 0.0, 0),
                TreeNode::Leaf {
                    value,
                    sample_count,
                } => (-1, 0.0, -1, -1, value, sample_count),
            };
            flat.feature.push(f);
            flat.threshold.push(t);
            flat.left.push(l);
            flat.right.push(r);
            flat.value.push(v);
            flat.samples.push(s);
        }
        flat
    }
}

impl TryFrom<FlatTree> for Tree {
    type Error = Error;

    fn try_from(flat: FlatTree) -> Result<Self> {
        let n = flat.feature.len();
        let lens = [
            flat.threshold.len(),
            flat.left.len(),
            flat.right.len(),
            flat.value.len(),
            flat.samples.len(),
        ];
        if n == 0 || lens.iter().any(|&l| l != n) {
            return Err(Error::InvalidParameter(
                "tree arrays are empty or of unequal length".into(),
            ));
        }
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            if flat.feature[i] < 0 {
                nodes.push(TreeNode::Leaf {
                    value: flat.value[i],
                    sample_count: flat.samples[i],
                });
                continue;
            }
            let child_ok = |c: i64| c > i as i64 && (c as usize) < n;
            if !child_ok(flat.left[i]) || !child_ok(flat.right[i]) {
                return Err(Error::InvalidParameter(format!(
                    "tree node {i} has invalid children"
                )));
            }
            nodes.push(TreeNode::Internal {
                feature: flat.feature[i] as usize,
                threshold: flat.threshold[i],
                left: flat.left[i] as usize,
                right: flat.right[i] as usize,
            });
        }
        Ok(Tree { nodes })
    }
}

/// Gini impurity `1 - p^2 - (1-p)^2` of a node with `positives` out of `total`.
pub fn gini_impurity(positives: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = positives / total;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// How thresholds are proposed for each candidate feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ThresholdRule {
    /// Every midpoint between consecutive distinct values.
    Midpoints,
    /// One threshold drawn uniformly in `[min, max)` of the node's values.
    Random,
}

/// Class counts of one side of a split, weighted by bootstrap multiplicity.
#[derive(Debug, Clone, Copy, Default)]
struct ClassCounts {
    pos: u64,
    total: u64,
}

impl ClassCounts {
    fn sum_sq(&self) -> u128 {
        let (p, q) = (self.pos as u128, (self.total - self.pos) as u128);
        p * p + q * q
    }
}

/// Minimizing weighted child Gini is maximizing `sum_sq(l)/n_l + sum_sq(r)/n_r`.
/// The ratio is kept as an exact fraction so that ties are detected exactly.
#[derive(Debug, Clone, Copy)]
struct GiniScore {
    num: u128,
    den: u128,
}

impl GiniScore {
    fn of(left: ClassCounts, right: ClassCounts) -> Self {
        let (nl, nr) = (left.total as u128, right.total as u128);
        GiniScore {
            num: left.sum_sq() * nr + right.sum_sq() * nl,
            den: nl * nr,
        }
    }

    fn beats(&self, other: &GiniScore) -> bool {
        self.num * other.den > other.num * self.den
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    score: GiniScore,
}

/// Midpoint that is strictly below `hi`, so `hi` always goes right.
#[inline]
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid >= hi {
        lo
    } else {
        mid
    }
}

pub(crate) struct ClassifierBuilder<'a> {
    pub columns: &'a [Vec<f64>],
    pub labels: &'a [bool],
    /// Per-row multiplicity (bootstrap counts); rows with weight 0 are absent.
    pub weights: Option<&'a [u32]>,
    pub config: &'a TreeConfig,
    pub rule: ThresholdRule,
}

impl ClassifierBuilder<'_> {
    fn weight(&self, row: usize) -> u64 {
        self.weights.map_or(1, |w| w[row] as u64)
    }

    fn counts(&self, rows: &[usize]) -> ClassCounts {
        rows.iter().fold(ClassCounts::default(), |mut c, &r| {
            let w = self.weight(r);
            c.total += w;
            if self.labels[r] {
                c.pos += w;
            }
            c
        })
    }

    /// Grows a tree depth-first, left subtree before right. The RNG is used,
    /// in that node order, for feature subsampling and then for one
    /// threshold per non-constant candidate feature (random rule only).
    pub fn build(&self, rng: &mut Rng) -> Tree {
        let rows: Vec<usize> = (0..self.labels.len())
            .filter(|&r| self.weight(r) > 0)
            .collect();
        let mut nodes = Vec::new();
        self.grow(rows, 0, rng, &mut nodes);
        Tree { nodes }
    }

    fn grow(
        &self,
        rows: Vec<usize>,
        depth: usize,
        rng: &mut Rng,
        nodes: &mut Vec<TreeNode>,
    ) -> usize {
        let id = nodes.len();
        let counts = self.counts(&rows);
        let leaf = TreeNode::Leaf {
            value: if counts.total == 0 {
                0.0
            } else {
                counts.pos as f64 / counts.total as f64
            },
            sample_count: counts.total,
        };
        nodes.push(leaf);

        let pure = counts.pos == 0 || counts.pos == counts.total;
        let depth_capped = self.config.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || counts.total < self.config.min_samples_split as u64 {
            return id;
        }
        let Some(best) = self.find_split(&rows, counts, rng) else {
            return id;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.columns[best.feature][r] <= best.threshold);
        let left = self.grow(left_rows, depth + 1, rng, nodes);
        let right = self.grow(right_rows, depth + 1, rng, nodes);
        nodes[id] = TreeNode::Internal {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn find_split(&self, rows: &[usize], counts: ClassCounts, rng: &mut Rng) -> Option<Candidate> {
        let features = candidate_features(self.columns.len(), self.config.max_features, rng);
        let per_feature: Vec<Option<Candidate>> = match self.rule {
            ThresholdRule::Midpoints => {
                if rows.len() * features.len() >= PARALLEL_WORK {
                    features
                        .par_iter()
                        .map(|&f| self.best_midpoint(f, rows, counts))
                        .collect()
                } else {
                    features
                        .iter()
                        .map(|&f| self.best_midpoint(f, rows, counts))
                        .collect()
                }
            }
            ThresholdRule::Random => features
                .iter()
                .map(|&f| self.random_threshold(f, rows, counts, rng))
                .collect(),
        };
        // features are ascending, so keeping the first maximum breaks ties by index
        per_feature
            .into_iter()
            .flatten()
            .fold(None, |best: Option<Candidate>, c| match best {
                Some(b) if !c.score.beats(&b.score) => Some(b),
                _ => Some(c),
            })
    }

    fn best_midpoint(
        &self,
        feature: usize,
        rows: &[usize],
        counts: ClassCounts,
    ) -> Option<Candidate> {
        let column = &self.columns[feature];
        let mut sorted: Vec<(f64, usize)> = rows.iter().map(|&r| (column[r], r)).collect();
        sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = ClassCounts::default();
        let mut best: Option<Candidate> = None;
        for i in 0..sorted.len() - 1 {
            let (x, r) = sorted[i];
            let w = self.weight(r);
            left.total += w;
            if self.labels[r] {
                left.pos += w;
            }
            let next = sorted[i + 1].0;
            if next <= x {
                continue;
            }
            let right = ClassCounts {
                pos: counts.pos - left.pos,
                total: counts.total - left.total,
            };
            let score = GiniScore::of(left, right);
            if best.as_ref().is_none_or(|b| score.beats(&b.score)) {
                best = Some(Candidate {
                    feature,
                    threshold: midpoint(x, next),
                    score,
                });
            }
        }
        best
    }

    fn random_threshold(
        &self,
        feature: usize,
        rows: &[usize],
        counts: ClassCounts,
        rng: &mut Rng,
    ) -> Option<Candidate> {
        let column = &self.columns[feature];
        let (lo, hi) = rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                (lo.min(column[r]), hi.max(column[r]))
            });
        if lo >= hi {
            return None;
        }
        let threshold: f64 = rng.random_range(lo..hi);
        let mut left = ClassCounts::default();
        for &r in rows {
            if column[r] <= threshold {
                let w = self.weight(r);
                left.total += w;
                if self.labels[r] {
                    left.pos += w;
                }
            }
        }
        let right = ClassCounts {
            pos: counts.pos - left.pos,
            total: counts.total - left.total,
        };
        Some(Candidate {
            feature,
            threshold,
            score: GiniScore::of(left, right),
        })
    }
}

/// Candidate feature indices in ascending order. Draws from the RNG only
/// when subsampling.
pub(crate) fn candidate_features(
    n_features: usize,
    rule: MaxFeatures,
    rng: &mut Rng,
) -> Vec<usize> {
    let k = rule.resolve(n_features);
    if k >= n_features {
        return (0..n_features).collect();
    }
    let mut picked = index::sample(rng, n_features, k).into_vec();
    picked.sort_unstable();
    picked
}

/// Gradient statistics of a boosting node.
#[derive(Debug, Clone, Copy, Default)]
struct GradStats {
    sum: f64,
    hess: f64,
    count: usize,
}

/// Regression tree on residuals: splits maximize `S_l^2/n_l + S_r^2/n_r`
/// (equivalently minimize child squared error) and leaves hold one Newton
/// step `sum(r) / max(sum(h), eps)`.
pub(crate) struct RegressionBuilder<'a> {
    pub columns: &'a [Vec<f64>],
    pub residuals: &'a [f64],
    pub hessians: &'a [f64],
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub epsilon: f64,
}

impl RegressionBuilder<'_> {
    pub fn build(&self) -> Tree {
        let rows: Vec<usize> = (0..self.residuals.len()).collect();
        let mut nodes = Vec::new();
        self.grow(rows, 0, &mut nodes);
        Tree { nodes }
    }

    fn stats(&self, rows: &[usize]) -> GradStats {
        let mut s = GradStats::default();
        for &r in rows {
            s.sum += self.residuals[r];
            s.hess += self.hessians[r];
            s.count += 1;
        }
        s
    }

    fn grow(&self, rows: Vec<usize>, depth: usize, nodes: &mut Vec<TreeNode>) -> usize {
        let id = nodes.len();
        let stats = self.stats(&rows);
        nodes.push(TreeNode::Leaf {
            value: stats.sum / stats.hess.max(self.epsilon),
            sample_count: stats.count as u64,
        });
        if depth >= self.max_depth || stats.count < self.min_samples_split {
            return id;
        }
        let parent_gain = stats.sum * stats.sum / stats.count as f64;
        let Some((feature, threshold, gain)) = self.find_split(&rows, stats) else {
            return id;
        };
        if gain <= parent_gain {
            return id;
        }
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.columns[feature][r] <= threshold);
        let left = self.grow(left_rows, depth + 1, nodes);
        let right = self.grow(right_rows, depth + 1, nodes);
        nodes[id] = TreeNode::Internal {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    fn find_split(&self, rows: &[usize], stats: GradStats) -> Option<(usize, f64, f64)> {
        let search = |f: usize| self.best_for_feature(f, rows, stats);
        let per_feature: Vec<Option<(usize, f64, f64)>> =
            if rows.len() * self.columns.len() >= PARALLEL_WORK {
                (0..self.columns.len())
                    .into_par_iter()
                    .map(search)
                    .collect()
            } else {
                (0..self.columns.len()).map(search).collect()
            };
        per_feature.into_iter().flatten().fold(
            None,
            |best: Option<(usize, f64, f64)>, c| match best {
                Some(b) if c.2.partial_cmp(&b.2) != Some(Ordering::Greater) => Some(b),
                _ => Some(c),
            },
        )
    }

    fn best_for_feature(
        &self,
        feature: usize,
        rows: &[usize],
        stats: GradStats,
    ) -> Option<(usize, f64, f64)> {
        let column = &self.columns[feature];
        let mut sorted: Vec<(f64, f64)> = rows
            .iter()
            .map(|&r| (column[r], self.residuals[r]))
            .collect();
        sorted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let n = sorted.len();
        let mut left_sum = 0.0;
        let mut best: Option<(usize, f64, f64)> = None;
        for i in 0..n - 1 {
            left_sum += sorted[i].1;
            let (x, next) = (sorted[i].0, sorted[i + 1].0);
            if next <= x {
                continue;
            }
            let nl = (i + 1) as f64;
            let nr = (n - i - 1) as f64;
            let right_sum = stats.sum - left_sum;
            let gain = left_sum * left_sum / nl + right_sum * right_sum / nr;
            if best.is_none_or(|b| gain > b.2) {
                best = Some((feature, midpoint(x, next), gain));
            }
        }
        best
    }
}

//! Independent reference computations shared by the integration tests and
//! the acceptance harness. None of these reuse the library's search or
//! accumulation code.

#![allow(dead_code)]

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seizure_core::models::{self, loss_and_gradient, member_seed, ModelKind, TreeConfig, TreeNode};
use seizure_core::rng::seeded;
use seizure_core::{BinaryLabels, Matrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fraction of (positive, negative) pairs where the positive scores higher,
/// ties counted one half.
pub fn mann_whitney(labels: &[bool], scores: &[f64]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Random scores drawn from a small grid so that ties are common.
pub fn tied_scores(rng: &mut ChaCha8Rng, n: usize) -> (Vec<bool>, Vec<f64>) {
    loop {
        let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        if labels.iter().any(|&l| l) && labels.iter().any(|&l| !l) {
            let grid = rng.random_range(2..12);
            let scores = (0..n)
                .map(|_| rng.random_range(0..grid) as f64 / grid as f64)
                .collect();
            return (labels, scores);
        }
    }
}

/// Exact rational `num / den` with positive denominator.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    pub num: i128,
    pub den: i128,
}

impl Ratio {
    pub fn lt(&self, other: &Ratio) -> bool {
        self.num * other.den < other.num * self.den
    }
}

/// Weighted child Gini `sum_c n_c * (1 - sum_k (k/n_c)^2) / n`, kept exact
/// (up to the common factor `1/n`).
pub fn weighted_gini(left: (i128, i128), right: (i128, i128)) -> Ratio {
    let part = |(pos, n): (i128, i128)| -> Ratio {
        let neg = n - pos;
        Ratio {
            num: n * n - pos * pos - neg * neg,
            den: n,
        }
    };
    let (a, b) = (part(left), part(right));
    Ratio {
        num: a.num * b.den + b.num * a.den,
        den: a.den * b.den,
    }
}

/// Best split by exhaustive enumeration: every feature, every midpoint
/// between consecutive distinct values, lowest feature then lowest
/// threshold winning ties. Returns the feature and the rows sent left.
pub fn exhaustive_split(x: &Matrix, y: &[bool], rows: &[usize]) -> Option<(usize, Vec<usize>)> {
    let mut best: Option<(Ratio, usize, Vec<usize>)> = None;
    for f in 0..x.cols() {
        let mut values: Vec<f64> = rows.iter().map(|&r| x.get(r, f)).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for pair in values.windows(2) {
            let t = (pair[0] + pair[1]) / 2.0;
            let left: Vec<usize> = rows.iter().copied().filter(|&r| x.get(r, f) <= t).collect();
            let right: Vec<usize> = rows.iter().copied().filter(|&r| x.get(r, f) > t).collect();
            let count =
                |s: &[usize]| (s.iter().filter(|&&r| y[r]).count() as i128, s.len() as i128);
            let g = weighted_gini(count(&left), count(&right));
            if best.as_ref().is_none_or(|(b, _, _)| g.lt(b)) {
                best = Some((g, f, left));
            }
        }
    }
    best.map(|(_, f, left)| (f, left))
}

/// Rows of `rows` that reach node `target` of a tree.
pub fn rows_at_node(nodes: &[TreeNode], x: &Matrix, rows: &[usize], target: usize) -> Vec<usize> {
    rows.iter()
        .copied()
        .filter(|&r| {
            let mut i = 0;
            loop {
                if i == target {
                    return true;
                }
                match nodes[i] {
                    TreeNode::Leaf { .. } => return false,
                    TreeNode::Internal {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        i = if x.get(r, feature) <= threshold {
                            left
                        } else {
                            right
                        }
                    }
                }
            }
        })
        .collect()
}

/// Central finite differences of the regularized logistic loss; returns the
/// worst relative error against the analytic gradient.
pub fn logistic_gradient_error(x: &Matrix, y: &BinaryLabels, w: &[f64], b: f64, l2: f64) -> f64 {
    let h = 1e-5;
    let analytic = loss_and_gradient(x, y, w, b, l2);
    let loss_at = |w: &[f64], b: f64| loss_and_gradient(x, y, w, b, l2).loss;
    let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(1e-8);
    let mut worst: f64 = 0.0;
    for j in 0..w.len() {
        let mut plus = w.to_vec();
        let mut minus = w.to_vec();
        plus[j] += h;
        minus[j] -= h;
        let numeric = (loss_at(&plus, b) - loss_at(&minus, b)) / (2.0 * h);
        worst = worst.max(rel(analytic.weights[j], numeric));
    }
    let numeric = (loss_at(w, b + h) - loss_at(w, b - h)) / (2.0 * h);
    worst.max(rel(analytic.bias, numeric))
}

/// Mean logistic loss of raw scores against labels.
pub fn log_loss(raw: &[f64], y: &[bool]) -> f64 {
    raw.iter()
        .zip(y)
        .map(|(&f, &l)| {
            let p = 1.0 / (1.0 + (-f).exp());
            let p = p.clamp(1e-300, 1.0 - 1e-16);
            if l {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / raw.len() as f64
}

/// Straightforward recursive extra-trees member, consuming the generator in
/// the documented order: per node (pre-order, left first) a feature
/// subsample when subsampling, then one uniform threshold per candidate
/// feature that is not constant in the node.
pub struct SlowExtraTree {
    nodes: Vec<SlowNode>,
}

enum SlowNode {
    Split(usize, f64, usize, usize),
    Leaf(f64),
}

impl SlowExtraTree {
    pub fn fit(rows: &[Vec<f64>], y: &[bool], k: usize, seed: u64, index_in_forest: usize) -> Self {
        let mut rng = seeded(member_seed(ModelKind::ExtraTrees, seed, index_in_forest));
        let mut tree = SlowExtraTree { nodes: Vec::new() };
        let all: Vec<usize> = (0..rows.len()).collect();
        tree.grow(rows, y, &all, k, &mut rng);
        tree
    }

    fn grow(
        &mut self,
        rows: &[Vec<f64>],
        y: &[bool],
        idx: &[usize],
        k: usize,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let id = self.nodes.len();
        let pos = idx.iter().filter(|&&i| y[i]).count();
        self.nodes
            .push(SlowNode::Leaf(pos as f64 / idx.len() as f64));
        if pos == 0 || pos == idx.len() || idx.len() < 2 {
            return id;
        }
        let d = rows[0].len();
        let mut features: Vec<usize> = if k >= d {
            (0..d).collect()
        } else {
            index::sample(rng, d, k).into_vec()
        };
        features.sort();
        let mut best: Option<(Ratio, usize, f64)> = None;
        for f in features {
            let lo = idx
                .iter()
                .map(|&i| rows[i][f])
                .fold(f64::INFINITY, f64::min);
            let hi = idx
                .iter()
                .map(|&i| rows[i][f])
                .fold(f64::NEG_INFINITY, f64::max);
            if lo >= hi {
                continue;
            }
            let t: f64 = rng.random_range(lo..hi);
            let left: Vec<usize> = idx.iter().copied().filter(|&i| rows[i][f] <= t).collect();
            let right: Vec<usize> = idx.iter().copied().filter(|&i| rows[i][f] > t).collect();
            let count =
                |s: &[usize]| (s.iter().filter(|&&i| y[i]).count() as i128, s.len() as i128);
            let g = weighted_gini(count(&left), count(&right));
            if best.as_ref().is_none_or(|(b, _, _)| g.lt(b)) {
                best = Some((g, f, t));
            }
        }
        let Some((_, f, t)) = best else {
            return id;
        };
        let left: Vec<usize> = idx.iter().copied().filter(|&i| rows[i][f] <= t).collect();
        let right: Vec<usize> = idx.iter().copied().filter(|&i| rows[i][f] > t).collect();
        let l = self.grow(rows, y, &left, k, rng);
        let r = self.grow(rows, y, &right, k, rng);
        self.nodes[id] = SlowNode::Split(f, t, l, r);
        id
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                SlowNode::Leaf(v) => return v,
                SlowNode::Split(f, t, l, r) => i = if row[f] <= t { l } else { r },
            }
        }
    }
}

/// Two Gaussian blobs in `dims` dimensions with some label noise.
pub fn blobs(rng: &mut ChaCha8Rng, n: usize, dims: usize) -> (Matrix, BinaryLabels) {
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let positive = i % 2 == 0;
        let centre = if positive { 1.0 } else { -1.0 };
        let row: Vec<f64> = (0..dims)
            .map(|d| {
                let spread: f64 = (0..4).map(|_| rng.random_range(-1.0..1.0)).sum();
                if d < 2 {
                    centre + spread
                } else {
                    spread
                }
            })
            .collect();
        rows.push(row);
        labels.push(if rng.random_bool(0.05) {
            !positive
        } else {
            positive
        });
    }
    (Matrix::from_rows(&rows).unwrap(), BinaryLabels(labels))
}

/// Small random matrix with integer-valued features (many ties).
pub fn small_integer_data(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> (Matrix, Vec<bool>) {
    let levels = rng.random_range(2..8);
    let data = (0..rows * cols)
        .map(|_| rng.random_range(0..levels) as f64)
        .collect();
    let labels = (0..rows).map(|_| rng.random_bool(0.5)).collect();
    (Matrix::new(rows, cols, data).unwrap(), labels)
}

/// Walks every node of a default decision tree fitted on `(x, y)` and checks
/// it against [`exhaustive_split`] on the rows that reach it.
pub fn tree_matches_exhaustive(x: &Matrix, y: &[bool]) -> Result<(), String> {
    let labels = BinaryLabels(y.to_vec());
    let model = models::train_decision_tree(x, &labels, &TreeConfig::default(), 0)
        .map_err(|e| e.to_string())?;
    let nodes = model.trees()[0].nodes();
    let all: Vec<usize> = (0..x.rows()).collect();
    for (id, node) in nodes.iter().enumerate() {
        let rows = rows_at_node(nodes, x, &all, id);
        let expected = exhaustive_split(x, y, &rows);
        let pos = rows.iter().filter(|&&r| y[r]).count();
        match *node {
            TreeNode::Leaf {
                value,
                sample_count,
            } => {
                if sample_count as usize != rows.len() || value != pos as f64 / rows.len() as f64 {
                    return Err(format!("leaf {id} statistics disagree"));
                }
                if pos != 0 && pos != rows.len() && expected.is_some() {
                    return Err(format!("leaf {id} could still split"));
                }
            }
            TreeNode::Internal {
                feature, threshold, ..
            } => {
                let Some((f, left)) = expected else {
                    return Err(format!("node {id} split where no split exists"));
                };
                let actual: Vec<usize> = rows
                    .iter()
                    .copied()
                    .filter(|&r| x.get(r, feature) <= threshold)
                    .collect();
                if feature != f || actual != left {
                    return Err(format!(
                        "node {id}: chose feature {feature}, oracle chose {f}"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Quantile by linear interpolation between order statistics at `q * (n - 1)`.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

//! CART decision tree with weighted impurity decrease.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, num};
use crate::error::{Error, Result};
use crate::features::Matrix;

/// Gains closer than this are treated as equal.
const GAIN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    #[default]
    Gini,
    /// Entropy in bits; the decrease is the information gain.
    #[serde(alias = "entropy")]
    InformationGain,
}

impl Criterion {
    /// Impurity of a weighted class histogram with total `n > 0`.
    pub fn impurity(self, counts: &[f64], n: f64) -> f64 {
        match self {
            Criterion::Gini => 1.0 - counts.iter().map(|c| (c / n).powi(2)).sum::<f64>(),
            Criterion::InformationGain => -counts
                .iter()
                .filter(|&&c| c > 0.0)
                .map(|c| {
                    let p = c / n;
                    p * p.log2()
                })
                .sum::<f64>(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub criterion: Criterion,
    /// A split is kept only if its weighted impurity decrease reaches this.
    #[serde(with = "num::scalar")]
    pub min_impurity_decrease: f64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            criterion: Criterion::Gini,
            min_impurity_decrease: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Leaf {
        /// Weighted class histogram of the training samples reaching the leaf.
        #[serde(with = "num::vec")]
        counts: Vec<f64>,
    },
    Split {
        feature: usize,
        /// Samples with `x[feature] <= threshold` go left.
        #[serde(with = "num::scalar")]
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// A fitted tree; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub n_classes: usize,
    pub nodes: Vec<Node>,
}

/// The best split found at a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    /// Weighted impurity decrease, `N_t / N * (I - N_l/N_t I_l - N_r/N_t I_r)`.
    pub decrease: f64,
}

fn better(candidate: &SplitChoice, best: Option<&SplitChoice>) -> bool {
    let Some(b) = best else { return true };
    if candidate.decrease > b.decrease + GAIN_TOL {
        return true;
    }
    if candidate.decrease < b.decrease - GAIN_TOL {
        return false;
    }
    (candidate.feature, candidate.threshold) < (b.feature, b.threshold)
}

/// Column-major copy of the training matrix, shared by the trees of a forest.
pub struct Columns {
    pub cols: Vec<Vec<f64>>,
    pub rows: usize,
}

impl Columns {
    pub fn from_matrix(x: &Matrix) -> Columns {
        let mut cols = vec![Vec::with_capacity(x.rows); x.cols];
        for i in 0..x.rows {
            for (c, v) in cols.iter_mut().zip(x.row(i)) {
                c.push(*v);
            }
        }
        Columns { cols, rows: x.rows }
    }
}

/// How candidate features are chosen at each node.
pub enum FeatureChoice<'r, R: Rng> {
    /// Every feature, in index order.
    All,
    /// Features visited in random order until this many non-constant ones
    /// have been evaluated.
    Sample(usize, &'r mut R),
}

struct Builder<'a> {
    x: &'a Columns,
    y: &'a [usize],
    w: &'a [f64],
    k: usize,
    params: TreeParams,
    total: f64,
}

impl Builder<'_> {
    fn histogram(&self, idx: &[usize]) -> Vec<f64> {
        let mut h = vec![0.0; self.k];
        for &i in idx {
            h[self.y[i]] += self.w[i];
        }
        h
    }

    /// Best threshold on one feature, or `None` if the feature is constant
    /// on the node.
    fn best_on_feature(&self, f: usize, idx: &[usize], hist: &[f64], n_t: f64, imp: f64) -> Option<SplitChoice> {
        let col = &self.x.cols[f];
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
        if col[order[0]] == col[order[order.len() - 1]] {
            return None;
        }
        let mut left = vec![0.0; self.k];
        let mut n_l = 0.0;
        let mut best: Option<SplitChoice> = None;
        for p in 0..order.len() - 1 {
            let i = order[p];
            left[self.y[i]] += self.w[i];
            n_l += self.w[i];
            let (a, b) = (col[i], col[order[p + 1]]);
            if a == b {
                continue;
            }
            let right: Vec<f64> = hist.iter().zip(&left).map(|(h, l)| h - l).collect();
            let n_r = n_t - n_l;
            let child = n_l / n_t * self.params.criterion.impurity(&left, n_l)
                + n_r / n_t * self.params.criterion.impurity(&right, n_r);
            let mut threshold = a + (b - a) / 2.0;
            if threshold >= b {
                threshold = a;
            }
            let cand = SplitChoice {
                feature: f,
                threshold,
                decrease: n_t / self.total * (imp - child),
            };
            if better(&cand, best.as_ref()) {
                best = Some(cand);
            }
        }
        best
    }

    fn best_split<R: Rng>(&self, idx: &[usize], hist: &[f64], choice: &mut FeatureChoice<'_, R>) -> Option<SplitChoice> {
        let n_t: f64 = hist.iter().sum();
        let imp = self.params.criterion.impurity(hist, n_t);
        let d = self.x.cols.len();
        let mut best: Option<SplitChoice> = None;
        let consider = |f: usize, best: &mut Option<SplitChoice>| -> bool {
            match self.best_on_feature(f, idx, hist, n_t, imp) {
                Some(c) => {
                    if better(&c, best.as_ref()) {
                        *best = Some(c);
                    }
                    true
                }
                None => false,
            }
        };
        match choice {
            FeatureChoice::All => {
                for f in 0..d {
                    consider(f, &mut best);
                }
            }
            FeatureChoice::Sample(m, rng) => {
                let mut features: Vec<usize> = (0..d).collect();
                let mut evaluated = 0;
                for j in 0..d {
                    if evaluated >= *m {
                        break;
                    }
                    let r = rng.random_range(j..d);
                    features.swap(j, r);
                    if consider(features[j], &mut best) {
                        evaluated += 1;
                    }
                }
            }
        }
        best
    }
}

impl DecisionTree {
    /// Fit on all rows with unit weights, every feature considered.
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, params: TreeParams) -> Result<DecisionTree> {
        let cols = Columns::from_matrix(x);
        let w = vec![1.0; x.rows];
        Self::fit_weighted::<rand_chacha::ChaCha8Rng>(&cols, y, &w, n_classes, params, FeatureChoice::All)
    }

    /// Fit with per-row weights (bootstrap counts); rows of weight zero are
    /// ignored.
    pub fn fit_weighted<R: Rng>(
        x: &Columns,
        y: &[usize],
        w: &[f64],
        n_classes: usize,
        params: TreeParams,
        mut choice: FeatureChoice<'_, R>,
    ) -> Result<DecisionTree> {
        if x.rows != y.len() || w.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.rows,
                actual: y.len(),
            });
        }
        let idx: Vec<usize> = (0..x.rows).filter(|&i| w[i] > 0.0).collect();
        if idx.is_empty() {
            return Err(Error::Invalid("cannot fit a tree on an empty training set".into()));
        }
        let b = Builder {
            x,
            y,
            w,
            k: n_classes,
            params,
            total: idx.iter().map(|&i| w[i]).sum(),
        };
        let mut nodes: Vec<Node> = vec![Node::Leaf { counts: vec![] }];
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, idx)];
        while let Some((id, idx)) = stack.pop() {
            let hist = b.histogram(&idx);
            let pure = hist.iter().filter(|&&c| c > 0.0).count() <= 1;
            let split = if pure { None } else { b.best_split(&idx, &hist, &mut choice) };
            match split {
                Some(s) if s.decrease >= params.min_impurity_decrease - GAIN_TOL => {
                    let col = &x.cols[s.feature];
                    let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| col[i] <= s.threshold);
                    let left = nodes.len();
                    nodes.push(Node::Leaf { counts: vec![] });
                    nodes.push(Node::Leaf { counts: vec![] });
                    nodes[id] = Node::Split {
                        feature: s.feature,
                        threshold: s.threshold,
                        left,
                        right: left + 1,
                    };
                    // right first so the left subtree is numbered first
                    stack.push((left + 1, r));
                    stack.push((left, l));
                }
                _ => nodes[id] = Node::Leaf { counts: hist },
            }
        }
        Ok(DecisionTree { n_classes, nodes })
    }

    /// Best root split over every feature, as the tree would choose it.
    pub fn root_split(x: &Matrix, y: &[usize], n_classes: usize, criterion: Criterion) -> Option<SplitChoice> {
        let cols = Columns::from_matrix(x);
        let w = vec![1.0; x.rows];
        let b = Builder {
            x: &cols,
            y,
            w: &w,
            k: n_classes,
            params: TreeParams {
                criterion,
                min_impurity_decrease: 0.0,
            },
            total: x.rows as f64,
        };
        let idx: Vec<usize> = (0..x.rows).collect();
        let hist = b.histogram(&idx);
        b.best_split::<rand_chacha::ChaCha8Rng>(&idx, &hist, &mut FeatureChoice::All)
    }

    fn leaf(&self, x: &[f64]) -> &[f64] {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Class fractions at the leaf reached by `x`.
    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let c = self.leaf(x);
        let n: f64 = c.iter().sum();
        c.iter().map(|v| v / n).collect()
    }

    /// Majority class at the leaf; ties go to the lower class index.
    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(self.leaf(x))
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

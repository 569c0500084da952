//! Random forest of CART trees with bootstrap resampling and per-split
//! feature subsampling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{Columns, DecisionTree, FeatureChoice, TreeParams};
use crate::error::Result;
use crate::features::Matrix;
use crate::rng::stage_rng_n;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    /// `ceil(sqrt(d))` candidates per split.
    #[default]
    Sqrt,
    /// Every feature, in index order.
    All,
}

impl MaxFeatures {
    pub fn count(self, d: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => (d as f64).sqrt().ceil().max(1.0) as usize,
            MaxFeatures::All => d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    #[serde(flatten)]
    pub tree: TreeParams,
    pub n_estimators: usize,
    /// Resample `n` rows with replacement per tree; when off every tree
    /// sees the training set as is.
    pub bootstrap: bool,
    pub max_features: MaxFeatures,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            tree: TreeParams::default(),
            n_estimators: 10,
            bootstrap: true,
            max_features: MaxFeatures::Sqrt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub n_classes: usize,
    pub trees: Vec<DecisionTree>,
}

/// Most frequent label; ties go to the lower class index.
pub fn majority_vote(votes: &[usize], n_classes: usize) -> usize {
    let mut counts = vec![0usize; n_classes];
    for &v in votes {
        counts[v] += 1;
    }
    // first maximum wins
    let mut best = 0;
    for c in 1..n_classes {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    best
}

impl RandomForest {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, params: ForestParams, seed: u64) -> Result<RandomForest> {
        let cols = Columns::from_matrix(x);
        let n = x.rows;
        let m = params.max_features.count(x.cols);
        let trees = (0..params.n_estimators.max(1))
            .into_par_iter()
            .map(|t| {
                let mut rng = stage_rng_n(seed, "forest-tree", t as u64);
                let mut w = vec![0.0; n];
                if params.bootstrap {
                    for _ in 0..n {
                        w[rng.random_range(0..n)] += 1.0;
                    }
                } else {
                    w.iter_mut().for_each(|v| *v = 1.0);
                }
                let choice = match params.max_features {
                    MaxFeatures::All => FeatureChoice::All,
                    MaxFeatures::Sqrt => FeatureChoice::Sample(m, &mut rng),
                };
                DecisionTree::fit_weighted(&cols, y, &w, n_classes, params.tree, choice)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RandomForest { n_classes, trees })
    }

    pub fn votes(&self, x: &[f64]) -> Vec<usize> {
        self.trees.iter().map(|t| t.predict(x)).collect()
    }

    /// Vote fractions per class.
    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.n_classes];
        for v in self.votes(x) {
            p[v] += 1.0;
        }
        let n = self.trees.len() as f64;
        p.iter_mut().for_each(|v| *v /= n);
        p
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        majority_vote(&self.votes(x), self.n_classes)
    }
}

//! Classifiers trained from scratch, random hyperparameter search and the
//! serialisable [`Model`].

pub mod forest;
pub mod gnb;
pub mod model;
pub mod num;
pub mod search;
pub mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Matrix;

pub use forest::{ForestParams, MaxFeatures, RandomForest};
pub use gnb::GaussianNb;
pub use model::{Model, ModelProvenance, Prediction, MODEL_VERSION};
pub use search::{random_search, random_search_matrix, sample_hyperparameters, SearchOutcome, Trial, DEFAULT_TRIALS};
pub use svm::{LinearSvm, SvmParams};
pub use tree::{Criterion, DecisionTree, TreeParams};

/// Index of the largest value; the first one wins ties. NaN never wins.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] || values[best].is_nan() {
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Gnb,
    Dtree,
    Rforest,
    Svm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Gnb, Algorithm::Dtree, Algorithm::Rforest, Algorithm::Svm];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gnb => "gnb",
            Algorithm::Dtree => "dtree",
            Algorithm::Rforest => "rforest",
            Algorithm::Svm => "svm",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gnb" | "naive-bayes" => Ok(Algorithm::Gnb),
            "dtree" | "tree" | "decision-tree" => Ok(Algorithm::Dtree),
            "rforest" | "forest" | "random-forest" => Ok(Algorithm::Rforest),
            "svm" | "linear-svm" => Ok(Algorithm::Svm),
            _ => Err(Error::Invalid(format!(
                "unknown algorithm {s:?} (expected gnb, dtree, rforest or svm)"
            ))),
        }
    }
}

/// Hyperparameters of one algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum Hyperparameters {
    Gnb,
    Dtree(TreeParams),
    Rforest(ForestParams),
    Svm(SvmParams),
}

impl Hyperparameters {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            Hyperparameters::Gnb => Algorithm::Gnb,
            Hyperparameters::Dtree(_) => Algorithm::Dtree,
            Hyperparameters::Rforest(_) => Algorithm::Rforest,
            Hyperparameters::Svm(_) => Algorithm::Svm,
        }
    }

    pub fn default_for(algorithm: Algorithm) -> Hyperparameters {
        match algorithm {
            Algorithm::Gnb => Hyperparameters::Gnb,
            Algorithm::Dtree => Hyperparameters::Dtree(TreeParams::default()),
            Algorithm::Rforest => Hyperparameters::Rforest(ForestParams::default()),
            Algorithm::Svm => Hyperparameters::Svm(SvmParams::default()),
        }
    }
}

/// Learned parameters of a fitted classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum Parameters {
    Gnb(GaussianNb),
    Dtree(DecisionTree),
    Rforest(RandomForest),
    Svm(LinearSvm),
}

impl Parameters {
    /// Fit on a standardised matrix with class indices `y < n_classes`.
    pub fn fit(hp: &Hyperparameters, x: &Matrix, y: &[usize], n_classes: usize, seed: u64) -> Result<Parameters> {
        if x.rows == 0 || x.rows != y.len() {
            return Err(Error::Invalid(format!(
                "training matrix has {} rows for {} labels",
                x.rows,
                y.len()
            )));
        }
        if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
            return Err(Error::Invalid(format!("class index {bad} outside {n_classes} classes")));
        }
        Ok(match *hp {
            Hyperparameters::Gnb => Parameters::Gnb(GaussianNb::fit(x, y, n_classes)?),
            Hyperparameters::Dtree(p) => Parameters::Dtree(DecisionTree::fit(x, y, n_classes, p)?),
            Hyperparameters::Rforest(p) => Parameters::Rforest(RandomForest::fit(x, y, n_classes, p, seed)?),
            Hyperparameters::Svm(p) => Parameters::Svm(LinearSvm::fit(x, y, n_classes, p, seed)?),
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Parameters::Gnb(_) => Algorithm::Gnb,
            Parameters::Dtree(_) => Algorithm::Dtree,
            Parameters::Rforest(_) => Algorithm::Rforest,
            Parameters::Svm(_) => Algorithm::Svm,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Parameters::Gnb(m) => m.log_prior.len(),
            Parameters::Dtree(m) => m.n_classes,
            Parameters::Rforest(m) => m.n_classes,
            Parameters::Svm(m) => m.n_classes,
        }
    }

    /// Per-class scores: posteriors (naive Bayes), leaf class fractions
    /// (tree), vote fractions (forest) or decision values (SVM).
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Parameters::Gnb(m) => m.posterior(x),
            Parameters::Dtree(m) => m.proba(x),
            Parameters::Rforest(m) => m.proba(x),
            Parameters::Svm(m) => m.decision(x),
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        match self {
            Parameters::Gnb(m) => m.predict(x),
            Parameters::Dtree(m) => m.predict(x),
            Parameters::Rforest(m) => m.predict(x),
            Parameters::Svm(m) => m.predict(x),
        }
    }

    pub fn predict_all(&self, x: &Matrix) -> Vec<usize> {
        (0..x.rows).map(|i| self.predict(x.row(i))).collect()
    }
}

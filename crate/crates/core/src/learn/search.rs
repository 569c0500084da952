//! Random hyperparameter search scored by validation macro F1.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{class_indices, design_matrix, prepare};
use super::{Algorithm, Criterion, ForestParams, Hyperparameters, MaxFeatures, Parameters, SvmParams, TreeParams};
use crate::dataset::{split_train_test, LabeledDataset, LabeledInstance, Task};
use crate::error::{Error, Result};
use crate::eval::macro_f1;
use crate::features::{FeatureBlocks, Matrix};
use crate::rng::{derive_seed, derive_seed_n, stage_rng, stage_rng_n};
use crate::vocab::Vocabulary;

pub const DEFAULT_TRIALS: usize = 20;
/// Fraction of the training split used for fitting inside a trial.
pub const CARVE_RATIO: f64 = 0.8;

pub const MIN_IMPURITY_DECREASE_MAX: f64 = 1.0;
pub const N_ESTIMATORS_RANGE: (usize, usize) = (5, 20);
pub const PENALTY_MAX: f64 = 5.0;
pub const TOLERANCE_MAX: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub hyperparameters: Hyperparameters,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: Hyperparameters,
    pub best_index: usize,
    pub best_score: f64,
    pub trials: Vec<Trial>,
}

/// Draw one configuration uniformly from the algorithm's search space.
pub fn sample_hyperparameters<R: Rng>(algorithm: Algorithm, rng: &mut R) -> Hyperparameters {
    let tree = |rng: &mut R| TreeParams {
        criterion: if rng.random_bool(0.5) {
            Criterion::Gini
        } else {
            Criterion::InformationGain
        },
        min_impurity_decrease: rng.random_range(0.0..=MIN_IMPURITY_DECREASE_MAX),
    };
    match algorithm {
        Algorithm::Gnb => Hyperparameters::Gnb,
        Algorithm::Dtree => Hyperparameters::Dtree(tree(rng)),
        Algorithm::Rforest => {
            let t = tree(rng);
            Hyperparameters::Rforest(ForestParams {
                tree: t,
                n_estimators: rng.random_range(N_ESTIMATORS_RANGE.0..=N_ESTIMATORS_RANGE.1),
                bootstrap: true,
                max_features: MaxFeatures::Sqrt,
            })
        }
        Algorithm::Svm => Hyperparameters::Svm(SvmParams {
            penalty: rng.random_range(0.0..=PENALTY_MAX),
            tolerance: rng.random_range(0.0..=TOLERANCE_MAX),
            ..SvmParams::default()
        }),
    }
}

/// Earliest trial with the highest score.
fn pick_best(trials: Vec<Trial>) -> SearchOutcome {
    let mut best = 0;
    for (i, t) in trials.iter().enumerate() {
        if t.score > trials[best].score {
            best = i;
        }
    }
    SearchOutcome {
        best: trials[best].hyperparameters,
        best_index: best,
        best_score: trials[best].score,
        trials,
    }
}

fn run_trials(
    algorithm: Algorithm,
    train: (&Matrix, &[usize]),
    valid: (&Matrix, &[usize]),
    n_classes: usize,
    n_trials: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if n_trials == 0 {
        return Err(Error::Invalid("random search needs at least one trial".into()));
    }
    let trials = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let hp = sample_hyperparameters(algorithm, &mut stage_rng_n(seed, "search-trial", i as u64));
            let params = Parameters::fit(&hp, train.0, train.1, n_classes, derive_seed_n(seed, "search-fit", i as u64))?;
            let score = macro_f1(&params.predict_all(valid.0), valid.1, n_classes)?;
            log::debug!("trial {i}: {hp:?} -> {score:.4}");
            Ok(Trial {
                index: i,
                hyperparameters: hp,
                score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pick_best(trials))
}

/// Search on a standardised matrix: rows are carved per class into fitting
/// and validation parts.
pub fn random_search_matrix(
    algorithm: Algorithm,
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    n_trials: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in y.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut fit = Vec::new();
    let mut val = Vec::new();
    for (c, mut rows) in by_class {
        if rows.len() < 2 {
            return Err(Error::Dataset(format!("class {c} has fewer than 2 training rows")));
        }
        rows.shuffle(&mut stage_rng(seed, "search-carve", &c.to_string()));
        let t = crate::dataset::train_count(rows.len(), CARVE_RATIO);
        fit.extend_from_slice(&rows[..t]);
        val.extend_from_slice(&rows[t..]);
    }
    fit.sort_unstable();
    val.sort_unstable();
    let (fx, vx) = (x.select(&fit), x.select(&val));
    let fy: Vec<usize> = fit.iter().map(|&i| y[i]).collect();
    let vy: Vec<usize> = val.iter().map(|&i| y[i]).collect();
    run_trials(algorithm, (&fx, &fy), (&vx, &vy), n_classes, n_trials, seed)
}

/// Search on labeled training instances. Each trial fits on a stratified
/// 80 % carve whose own feature space and standardiser are built from the
/// carve alone, and is scored on the remaining 20 %.
pub fn random_search(
    algorithm: Algorithm,
    train: &[LabeledInstance],
    classes: &[String],
    vocab: &Vocabulary,
    task: &Task,
    n_trials: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    let mut grouped: BTreeMap<String, Vec<LabeledInstance>> = BTreeMap::new();
    for inst in train {
        grouped.entry(inst.label.clone()).or_default().push(inst.clone());
    }
    let cap = grouped.values().map(Vec::len).min().unwrap_or(0);
    let ds = LabeledDataset {
        task: task.clone(),
        classes: grouped,
        cap,
    };
    let carve = split_train_test(&ds, CARVE_RATIO, derive_seed(seed, "search-carve", ""))?;
    let p = prepare(&carve.train, classes, vocab, task, FeatureBlocks::default())?;
    let vx = design_matrix(&p.space, &p.standardizer, &carve.test, vocab)?;
    let vy = class_indices(&carve.test, classes)?;
    run_trials(algorithm, (&p.x, &p.y), (&vx, &vy), classes.len(), n_trials, seed)
}

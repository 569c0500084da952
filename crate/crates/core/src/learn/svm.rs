//! One-vs-rest linear SVM trained by stochastic subgradient descent on the
//! L2-regularised hinge loss (Pegasos steps). The iterate with the lowest
//! objective at an epoch end is kept.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{argmax, num};
use crate::error::{Error, Result};
use crate::features::Matrix;
use crate::rng::stage_rng;

pub const MAX_EPOCHS: usize = 10_000;
/// Consecutive epochs that fail to beat the best objective by `tolerance`
/// before training stops.
pub const PATIENCE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Weight of the hinge loss relative to the regulariser (`C`).
    #[serde(with = "num::scalar")]
    pub penalty: f64,
    /// Minimum improvement over the best objective that resets the
    /// [`PATIENCE`] counter. `f64::NEG_INFINITY` disables early stopping.
    #[serde(with = "num::scalar")]
    pub tolerance: f64,
    pub max_epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            penalty: 1.0,
            tolerance: 1e-4,
            max_epochs: MAX_EPOCHS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub n_classes: usize,
    /// One weight row per class (empty for a single-class model).
    #[serde(with = "num::matrix")]
    pub weights: Vec<Vec<f64>>,
    #[serde(with = "num::vec")]
    pub bias: Vec<f64>,
    /// Value of the constant feature that carries the bias during training.
    #[serde(with = "num::scalar")]
    pub bias_scale: f64,
    /// Epochs run per binary problem.
    pub epochs: Vec<usize>,
    /// Set when training saw a single class, which is then always predicted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<usize>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Regularised hinge objective `lambda/2 |w|^2 + mean(max(0, 1 - y w.x))`,
/// with `w` including the bias weight.
pub fn objective(w: &[f64], b: f64, bias_scale: f64, lambda: f64, x: &Matrix, y: &[f64]) -> f64 {
    let reg = lambda / 2.0 * (dot(w, w) + b * b);
    let hinge: f64 = (0..x.rows)
        .map(|i| (1.0 - y[i] * (dot(w, x.row(i)) + b * bias_scale)).max(0.0))
        .sum();
    reg + hinge / x.rows as f64
}

struct Binary {
    w: Vec<f64>,
    b: f64,
    epochs: usize,
}

fn train_binary(x: &Matrix, y: &[f64], lambda: f64, bias_scale: f64, params: &SvmParams, seed: u64, key: &str) -> Binary {
    let d = x.cols;
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let radius = 1.0 / lambda.sqrt();
    let mut rng = stage_rng(seed, "svm", key);
    let mut order: Vec<usize> = (0..x.rows).collect();
    let mut best = (objective(&w, b, bias_scale, lambda, x, y), w.clone(), b);
    let mut stale = 0;
    let mut t: u64 = 0;
    let mut epochs = 0;
    while epochs < params.max_epochs {
        epochs += 1;
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let row = x.row(i);
            let margin = y[i] * (dot(&w, row) + b * bias_scale);
            let shrink = 1.0 - 1.0 / t as f64;
            w.iter_mut().for_each(|v| *v *= shrink);
            b *= shrink;
            if margin < 1.0 {
                let step = eta * y[i];
                for (v, xv) in w.iter_mut().zip(row) {
                    *v += step * xv;
                }
                b += step * bias_scale;
            }
            let norm = (dot(&w, &w) + b * b).sqrt();
            if norm > radius {
                let s = radius / norm;
                w.iter_mut().for_each(|v| *v *= s);
                b *= s;
            }
        }
        let obj = objective(&w, b, bias_scale, lambda, x, y);
        stale = if best.0 - obj < params.tolerance { stale + 1 } else { 0 };
        if obj < best.0 {
            best = (obj, w.clone(), b);
        }
        if stale >= PATIENCE {
            break;
        }
    }
    let (_, w, b) = best;
    Binary { w, b: b * bias_scale, epochs }
}

impl LinearSvm {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, params: SvmParams, seed: u64) -> Result<LinearSvm> {
        if x.rows == 0 || x.rows != y.len() {
            return Err(Error::Invalid("SVM needs a non-empty training set".into()));
        }
        if !(params.penalty >= 0.0) {
            return Err(Error::Invalid(format!("negative SVM penalty {}", params.penalty)));
        }
        let bias_scale = {
            let ms = (0..x.rows).map(|i| dot(x.row(i), x.row(i))).sum::<f64>() / x.rows as f64;
            if ms > 0.0 {
                ms.sqrt()
            } else {
                1.0
            }
        };
        let present: Vec<bool> = (0..n_classes).map(|c| y.contains(&c)).collect();
        if present.iter().filter(|p| **p).count() < 2 {
            return Ok(LinearSvm {
                n_classes,
                weights: vec![],
                bias: vec![],
                bias_scale,
                epochs: vec![],
                constant: Some(y[0]),
            });
        }
        if params.penalty == 0.0 {
            log::warn!("SVM penalty 0 leaves only the regulariser; all weights stay zero");
            return Ok(LinearSvm {
                n_classes,
                weights: vec![vec![0.0; x.cols]; n_classes],
                bias: vec![0.0; n_classes],
                bias_scale,
                epochs: vec![0; n_classes],
                constant: None,
            });
        }
        let lambda = 1.0 / (params.penalty * x.rows as f64);
        let problems: Vec<Binary> = (0..n_classes)
            .map(|c| {
                let yc: Vec<f64> = y.iter().map(|&v| if v == c { 1.0 } else { -1.0 }).collect();
                train_binary(x, &yc, lambda, bias_scale, &params, seed, &c.to_string())
            })
            .collect();
        Ok(LinearSvm {
            n_classes,
            weights: problems.iter().map(|p| p.w.clone()).collect(),
            bias: problems.iter().map(|p| p.b).collect(),
            bias_scale,
            epochs: problems.iter().map(|p| p.epochs).collect(),
            constant: None,
        })
    }

    /// Decision value per class.
    pub fn decision(&self, x: &[f64]) -> Vec<f64> {
        if let Some(c) = self.constant {
            return (0..self.n_classes).map(|k| f64::from(u8::from(k == c))).collect();
        }
        self.weights.iter().zip(&self.bias).map(|(w, b)| dot(w, x) + b).collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.decision(x))
    }
}

//! Gaussian naive Bayes.

use serde::{Deserialize, Serialize};

use super::{argmax, num};
use crate::error::{Error, Result};
use crate::features::Matrix;

/// Fraction of the largest feature variance added to every class variance.
pub const VAR_SMOOTHING: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    #[serde(with = "num::vec")]
    pub log_prior: Vec<f64>,
    #[serde(with = "num::matrix")]
    pub mean: Vec<Vec<f64>>,
    /// Smoothed variances.
    #[serde(with = "num::matrix")]
    pub var: Vec<Vec<f64>>,
}

impl GaussianNb {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize) -> Result<GaussianNb> {
        if x.rows != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.rows,
                actual: y.len(),
            });
        }
        let mut count = vec![0usize; n_classes];
        for &c in y {
            count[c] += 1;
        }
        if count.iter().filter(|&&c| c > 0).count() < 2 {
            return Err(Error::Invalid(
                "naive Bayes needs training instances of at least two classes".into(),
            ));
        }
        let d = x.cols;
        let n = x.rows as f64;

        let mut overall_mean = vec![0.0; d];
        for i in 0..x.rows {
            for (m, v) in overall_mean.iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        overall_mean.iter_mut().for_each(|m| *m /= n);
        let mut overall_var = vec![0.0; d];
        for i in 0..x.rows {
            for ((s, v), m) in overall_var.iter_mut().zip(x.row(i)).zip(&overall_mean) {
                *s += (v - m).powi(2);
            }
        }
        let max_var = overall_var.iter().map(|s| s / n).fold(0.0, f64::max);
        let eps = if max_var > 0.0 { VAR_SMOOTHING * max_var } else { VAR_SMOOTHING };

        let mut mean = vec![vec![0.0; d]; n_classes];
        let mut var = vec![vec![0.0; d]; n_classes];
        for i in 0..x.rows {
            for (m, v) in mean[y[i]].iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        for c in 0..n_classes {
            if count[c] > 0 {
                mean[c].iter_mut().for_each(|m| *m /= count[c] as f64);
            }
        }
        for i in 0..x.rows {
            let c = y[i];
            for ((s, v), m) in var[c].iter_mut().zip(x.row(i)).zip(&mean[c]) {
                *s += (v - m).powi(2);
            }
        }
        for c in 0..n_classes {
            let nc = count[c].max(1) as f64;
            var[c].iter_mut().for_each(|s| *s = *s / nc + eps);
        }
        let log_prior = count
            .iter()
            .map(|&c| if c == 0 { f64::NEG_INFINITY } else { (c as f64 / n).ln() })
            .collect();
        Ok(GaussianNb { log_prior, mean, var })
    }

    /// Log of prior times class-conditional density, per class.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> Vec<f64> {
        use std::f64::consts::PI;
        self.log_prior
            .iter()
            .zip(self.mean.iter().zip(&self.var))
            .map(|(lp, (mu, var))| {
                let mut s = *lp;
                for ((xi, m), v) in x.iter().zip(mu).zip(var) {
                    s -= 0.5 * (2.0 * PI * v).ln() + (xi - m).powi(2) / (2.0 * v);
                }
                s
            })
            .collect()
    }

    /// Normalised class posteriors.
    pub fn posterior(&self, x: &[f64]) -> Vec<f64> {
        let jll = self.joint_log_likelihood(x);
        let max = jll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = jll.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = exp.iter().sum();
        exp.into_iter().map(|e| e / z).collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&self.joint_log_likelihood(x))
    }
}

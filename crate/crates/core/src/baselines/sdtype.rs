//! SD-Type restricted to outgoing statements.
//!
//! Each predicate key `p` gets a class distribution `P(c | p)` and a weight
//! measuring how far that distribution is from uniform,
//! `w(p) = sum_c (P(c | p) - 1/K)^2`. A node is scored per class by
//! `sum_p w(p) P(c | p)` over its distinct known keys.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dataset::{LabeledInstance, Task};
use crate::error::{Error, Result};
use crate::features::node_keys;
use crate::ingest::NodeRecord;
use crate::learn::{argmax, num};
use crate::vocab::Vocabulary;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyStatistics {
    /// `P(class | key)`, in class order.
    #[serde(with = "num::vec")]
    pub conditional: Vec<f64>,
    #[serde(with = "num::scalar")]
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdTypeStatistics {
    pub task: Task,
    pub classes: Vec<String>,
    #[serde(with = "num::vec")]
    pub prior: Vec<f64>,
    pub keys: BTreeMap<String, KeyStatistics>,
}

/// Distinct predicate keys of a node.
pub fn distinct_keys(node: &NodeRecord, vocab: &Vocabulary, task: &Task) -> BTreeSet<String> {
    node_keys(node, vocab, task).into_iter().collect()
}

impl SdTypeStatistics {
    /// Estimate the tables from labeled instances. `classes` fixes the class
    /// order.
    pub fn train(train: &[LabeledInstance], classes: &[String], vocab: &Vocabulary, task: &Task) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Dataset("SD-Type needs a non-empty training set".into()));
        }
        let k = classes.len();
        let mut prior = vec![0.0; k];
        let mut counts: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for inst in train {
            let c = classes
                .iter()
                .position(|x| *x == inst.label)
                .ok_or_else(|| Error::Invalid(format!("label {:?} not in the class list", inst.label)))?;
            prior[c] += 1.0;
            for key in distinct_keys(inst.node(), vocab, task) {
                counts.entry(key).or_insert_with(|| vec![0.0; k])[c] += 1.0;
            }
        }
        let n = train.len() as f64;
        prior.iter_mut().for_each(|p| *p /= n);
        let uniform = 1.0 / k as f64;
        let keys = counts
            .into_iter()
            .map(|(key, c)| {
                let total: f64 = c.iter().sum();
                let conditional: Vec<f64> = c.iter().map(|v| v / total).collect();
                let weight = conditional.iter().map(|p| (p - uniform).powi(2)).sum();
                (key, KeyStatistics { conditional, weight })
            })
            .collect();
        Ok(SdTypeStatistics {
            task: task.clone(),
            classes: classes.to_vec(),
            prior,
            keys,
        })
    }

    /// Weighted class scores, or `None` when no key of the node is known or
    /// every known key has zero weight.
    pub fn scores(&self, node: &NodeRecord, vocab: &Vocabulary) -> Option<Vec<f64>> {
        let mut s = vec![0.0; self.classes.len()];
        let mut total_weight = 0.0;
        for key in distinct_keys(node, vocab, &self.task) {
            if let Some(ks) = self.keys.get(&key) {
                total_weight += ks.weight;
                for (v, p) in s.iter_mut().zip(&ks.conditional) {
                    *v += ks.weight * p;
                }
            }
        }
        (total_weight > 0.0).then_some(s)
    }

    /// Class index: weighted argmax, else the prior argmax.
    pub fn predict_index(&self, node: &NodeRecord, vocab: &Vocabulary) -> usize {
        match self.scores(node, vocab) {
            Some(s) => argmax(&s),
            None => argmax(&self.prior),
        }
    }

    pub fn predict(&self, node: &NodeRecord, vocab: &Vocabulary) -> &str {
        &self.classes[self.predict_index(node, vocab)]
    }
}

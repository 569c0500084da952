use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{LabeledDataset, LabeledInstance, SamplingStrategy, Task};
use crate::error::{Error, Result};
use crate::rng::stage_rng;

/// Where a split came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub task: Task,
    pub strategy: Option<SamplingStrategy>,
    pub seed: u64,
    pub cap: usize,
    pub split_ratio: f64,
    pub vocabulary: String,
}

#[derive(Clone, Debug)]
pub struct DatasetSplit {
    pub train: Vec<LabeledInstance>,
    pub test: Vec<LabeledInstance>,
    pub provenance: Provenance,
}

impl DatasetSplit {
    /// Sorted class labels present in either part.
    pub fn classes(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .train
            .iter()
            .chain(&self.test)
            .map(|i| i.label.as_str())
            .collect();
        set.into_iter().map(String::from).collect()
    }
}

/// Number of training instances for a class of `n` at `ratio`: the floor,
/// kept within `[1, n - 1]` so both sides are non-empty.
pub(crate) fn train_count(n: usize, ratio: f64) -> usize {
    let t = (n as f64 * ratio + 1e-9).floor() as usize;
    t.clamp(1, n - 1)
}

/// Per-class shuffled split: `floor(n * ratio)` instances go to training.
pub fn split_train_test(sample: &LabeledDataset, ratio: f64, seed: u64) -> Result<DatasetSplit> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Invalid(format!("split ratio {ratio} outside (0, 1)")));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, members) in &sample.classes {
        let n = members.len();
        if n < 2 {
            return Err(Error::Dataset(format!(
                "class {class:?} has {n} instance(s); a split needs at least 2"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut stage_rng(seed, "split", class));
        let t = train_count(n, ratio);
        let (a, b) = order.split_at(t);
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        train.extend(a.into_iter().map(|i| members[i].clone()));
        test.extend(b.into_iter().map(|i| members[i].clone()));
    }
    Ok(DatasetSplit {
        train,
        test,
        provenance: Provenance {
            task: sample.task.clone(),
            strategy: None,
            seed,
            cap: sample.cap,
            split_ratio: ratio,
            vocabulary: String::new(),
        },
    })
}

/// Hold out whole plds: plds are visited in seeded random order and moved
/// to the held-out side until it holds at least `fraction` of all
/// instances. Plds holding more than `max_pld_share` of the instances stay
/// on the training side. Both sides keep every class; the training side's
/// cap is lowered to its smallest class if needed.
pub fn split_by_pld(
    dataset: &LabeledDataset,
    fraction: f64,
    max_pld_share: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Invalid(format!("held-out fraction {fraction} outside (0, 1)")));
    }
    let total = dataset.len();
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for i in dataset.instances() {
        *sizes.entry(i.pld()).or_default() += 1;
    }
    let mut plds: Vec<&str> = sizes.keys().copied().collect();
    plds.shuffle(&mut stage_rng(seed, "pld-holdout", ""));
    let target = (fraction * total as f64).ceil() as usize;
    let mut held: BTreeSet<&str> = BTreeSet::new();
    let mut held_n = 0;
    for p in plds {
        if held_n >= target {
            break;
        }
        let n = sizes[p];
        if n as f64 > max_pld_share * total as f64 {
            continue;
        }
        held.insert(p);
        held_n += n;
    }
    let mut train = BTreeMap::new();
    let mut test = BTreeMap::new();
    for (class, members) in &dataset.classes {
        let (h, t): (Vec<_>, Vec<_>) = members.iter().cloned().partition(|i| held.contains(i.pld()));
        if h.is_empty() || t.is_empty() {
            return Err(Error::Dataset(format!(
                "class {class:?} lost all instances on one side of the pld split"
            )));
        }
        test.insert(class.clone(), h);
        train.insert(class.clone(), t);
    }
    let cap_of = |c: &BTreeMap<String, Vec<LabeledInstance>>| c.values().map(Vec::len).min().unwrap_or(0);
    let train_cap = dataset.cap.min(cap_of(&train));
    let test_cap = cap_of(&test);
    Ok((
        LabeledDataset {
            task: dataset.task.clone(),
            classes: train,
            cap: train_cap,
        },
        LabeledDataset {
            task: dataset.task.clone(),
            classes: test,
            cap: test_cap,
        },
    ))
}

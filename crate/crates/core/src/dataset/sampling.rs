use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LabeledDataset, LabeledInstance};
use crate::error::{Error, Result};
use crate::rng::stage_rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingStrategy {
    /// Uniform draw per class.
    #[default]
    Stratified,
    /// Fair-share draw per class that favours long-tail plds.
    PldAware,
}

impl SamplingStrategy {
    fn stage(self) -> &'static str {
        match self {
            SamplingStrategy::Stratified => "sample-stratified",
            SamplingStrategy::PldAware => "sample-pld-aware",
        }
    }

    /// Short suffix used in dataset names (`Events_s`, `Events_p`).
    pub fn suffix(self) -> &'static str {
        match self {
            SamplingStrategy::Stratified => "s",
            SamplingStrategy::PldAware => "p",
        }
    }
}

impl fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingStrategy::Stratified => "stratified",
            SamplingStrategy::PldAware => "pld-aware",
        })
    }
}

impl FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stratified" | "s" => Ok(SamplingStrategy::Stratified),
            "pld" | "pld-aware" | "p" => Ok(SamplingStrategy::PldAware),
            _ => Err(Error::Invalid(format!(
                "unknown sampling strategy {s:?} (expected stratified or pld)"
            ))),
        }
    }
}

/// How many instances each pld contributes to a class sample of size `cap`.
///
/// `sizes` holds `(pld, instance count)`; the result is aligned with it.
/// Plds below the current fair share (remaining need over remaining plds)
/// are taken whole, repeatedly. Once every remaining pld reaches the fair
/// share, each gives its floor and the leftover is handed out one instance
/// at a time from the largest pld down, ties broken by pld name.
pub fn fair_share_allocation(sizes: &[(&str, usize)], cap: usize) -> Result<Vec<usize>> {
    let total: usize = sizes.iter().map(|(_, n)| n).sum();
    if total < cap {
        return Err(Error::Dataset(format!(
            "{total} instances cannot fill a sample of {cap}"
        )));
    }
    let mut alloc = vec![0usize; sizes.len()];
    let mut remaining: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i].1 > 0).collect();
    let mut need = cap;
    while need > 0 && !remaining.is_empty() {
        let m = remaining.len();
        // n < need / m, compared exactly
        let (below, rest): (Vec<usize>, Vec<usize>) =
            remaining.iter().partition(|&&i| sizes[i].1 * m < need);
        if below.is_empty() {
            let floor = need / m;
            for &i in &rest {
                alloc[i] = floor;
            }
            let mut residual = need - floor * m;
            let mut order = rest.clone();
            order.sort_by(|&a, &b| sizes[b].1.cmp(&sizes[a].1).then_with(|| sizes[a].0.cmp(sizes[b].0)));
            for &i in &order {
                if residual == 0 {
                    break;
                }
                // every pld here has size >= need/m, so size > floor unless
                // the division was exact, in which case residual is zero
                alloc[i] += 1;
                residual -= 1;
            }
            break;
        }
        for &i in &below {
            alloc[i] = sizes[i].1;
            need -= sizes[i].1;
        }
        remaining = rest;
    }
    Ok(alloc)
}

fn check_sizes(classes: &BTreeMap<String, Vec<LabeledInstance>>, cap: usize) -> Result<()> {
    if cap == 0 {
        return Err(Error::Dataset("class cap must be at least 1".into()));
    }
    for (name, members) in classes {
        if members.len() < cap {
            return Err(Error::UndersizedClass {
                class: name.clone(),
                size: members.len(),
                cap,
            });
        }
    }
    Ok(())
}

fn sample_class_stratified(members: &[LabeledInstance], cap: usize, seed: u64, class: &str) -> Vec<LabeledInstance> {
    let mut rng = stage_rng(seed, SamplingStrategy::Stratified.stage(), class);
    let mut picked = index::sample(&mut rng, members.len(), cap).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| members[i].clone()).collect()
}

fn sample_class_pld_aware(
    members: &[LabeledInstance],
    cap: usize,
    seed: u64,
    class: &str,
) -> Result<Vec<LabeledInstance>> {
    let mut by_pld: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, m) in members.iter().enumerate() {
        by_pld.entry(m.pld()).or_default().push(i);
    }
    let sizes: Vec<(&str, usize)> = by_pld.iter().map(|(p, v)| (*p, v.len())).collect();
    let alloc = fair_share_allocation(&sizes, cap)?;
    let mut rng = stage_rng(seed, SamplingStrategy::PldAware.stage(), class);
    let mut picked = Vec::with_capacity(cap);
    for (idx, &take) in by_pld.values().zip(&alloc) {
        if take == idx.len() {
            picked.extend_from_slice(idx);
        } else if take > 0 {
            picked.extend(index::sample(&mut rng, idx.len(), take).into_iter().map(|j| idx[j]));
        }
    }
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| members[i].clone()).collect())
}

/// Exactly `cap` instances per class, drawn uniformly without replacement.
pub fn sample_stratified(
    classes: &BTreeMap<String, Vec<LabeledInstance>>,
    cap: usize,
    seed: u64,
) -> Result<BTreeMap<String, Vec<LabeledInstance>>> {
    check_sizes(classes, cap)?;
    Ok(classes
        .par_iter()
        .map(|(c, m)| (c.clone(), sample_class_stratified(m, cap, seed, c)))
        .collect())
}

/// Exactly `cap` instances per class, allocated over plds by fair share and
/// drawn uniformly within each pld.
pub fn sample_pld_aware(
    classes: &BTreeMap<String, Vec<LabeledInstance>>,
    cap: usize,
    seed: u64,
) -> Result<BTreeMap<String, Vec<LabeledInstance>>> {
    check_sizes(classes, cap)?;
    classes
        .par_iter()
        .map(|(c, m)| Ok((c.clone(), sample_class_pld_aware(m, cap, seed, c)?)))
        .collect()
}

/// Balance a labeled dataset down to its cap with the given strategy.
pub fn sample(dataset: &LabeledDataset, strategy: SamplingStrategy, seed: u64) -> Result<LabeledDataset> {
    let classes = match strategy {
        SamplingStrategy::Stratified => sample_stratified(&dataset.classes, dataset.cap, seed)?,
        SamplingStrategy::PldAware => sample_pld_aware(&dataset.classes, dataset.cap, seed)?,
    };
    Ok(LabeledDataset {
        task: dataset.task.clone(),
        classes,
        cap: dataset.cap,
    })
}

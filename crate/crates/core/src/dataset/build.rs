use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::labels::{is_movie_with_genre, EventLabel};
use super::{
    event_class_frequencies, genre_frequencies, label_event_node, label_movie_node, GenreList,
    LabeledDataset, LabeledInstance, PageIndex, Task, OTHER,
};
use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

/// Counts gathered while labeling event nodes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventDatasetStats {
    /// Head subtypes chosen by frequency, most frequent first.
    pub top_k: Vec<String>,
    pub labeled: usize,
    pub generic: usize,
    pub multi_typed: usize,
}

fn check_cap(
    classes: &BTreeMap<String, Vec<LabeledInstance>>,
    cap: Option<usize>,
) -> Result<usize> {
    let smallest = classes.values().map(Vec::len).min().unwrap_or(0);
    let cap = cap.unwrap_or(smallest);
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
    Ok(cap)
}

/// Label every event node on the indexed pages and group the labeled ones
/// into the `k` most frequent subtypes plus [`OTHER`]. The cap defaults to
/// the size of the smallest class.
pub fn build_event_dataset(
    pages: &PageIndex,
    vocab: &Vocabulary,
    k: usize,
    cap: Option<usize>,
) -> Result<(LabeledDataset, EventDatasetStats)> {
    let freqs = event_class_frequencies(pages.nodes().map(|(p, i)| &p.nodes[i]), vocab);
    if freqs.len() <= k {
        return Err(Error::Dataset(format!(
            "need more than {k} event subtypes to form {k} head classes plus {OTHER}, found {}",
            freqs.len()
        )));
    }
    let top_k: Vec<String> = freqs.iter().take(k).map(|(n, _)| n.clone()).collect();
    let mut classes: BTreeMap<String, Vec<LabeledInstance>> = top_k
        .iter()
        .cloned()
        .chain(std::iter::once(OTHER.to_string()))
        .map(|c| (c, Vec::new()))
        .collect();
    let mut stats = EventDatasetStats {
        top_k: top_k.clone(),
        ..Default::default()
    };
    for (page, i) in pages.nodes() {
        match label_event_node(&page.nodes[i], vocab, &top_k) {
            EventLabel::Class(c) => {
                stats.labeled += 1;
                classes
                    .get_mut(&c)
                    .expect("label is a head class or Other")
                    .push(LabeledInstance::new(page.clone(), i, c)?);
            }
            EventLabel::Generic => stats.generic += 1,
            EventLabel::MultiType => stats.multi_typed += 1,
            EventLabel::NotEvent => {}
        }
    }
    let cap = check_cap(&classes, cap)?;
    Ok((
        LabeledDataset {
            task: Task::Events,
            classes,
            cap,
        },
        stats,
    ))
}

/// One binary dataset per head genre: positives carry the genre, every other
/// labeled movie is [`OTHER`]. All datasets share one cap: the smallest
/// class over all of them.
pub fn build_genre_datasets(
    pages: &PageIndex,
    vocab: &Vocabulary,
    genres: &GenreList,
    top: usize,
    cap: Option<usize>,
) -> Result<BTreeMap<String, LabeledDataset>> {
    let freqs = genre_frequencies(pages.nodes().map(|(p, i)| &p.nodes[i]), vocab, genres);
    if freqs.len() < top {
        let missing = genres
            .names()
            .find(|g| !freqs.iter().any(|(n, _)| n == g))
            .unwrap_or_default()
            .to_string();
        return Err(Error::Dataset(format!(
            "only {} genres have positives, need {top} (e.g. {missing:?} has none)",
            freqs.len()
        )));
    }
    let head: Vec<String> = freqs.iter().take(top).map(|(n, _)| n.clone()).collect();
    let movies: Vec<_> = pages
        .nodes()
        .filter(|(p, i)| is_movie_with_genre(&p.nodes[*i], vocab))
        .map(|(p, i)| (p.clone(), i, label_movie_node(&p.nodes[i], genres)))
        .collect();

    let mut out = BTreeMap::new();
    for g in &head {
        let mut classes: BTreeMap<String, Vec<LabeledInstance>> = BTreeMap::new();
        classes.insert(g.clone(), Vec::new());
        classes.insert(OTHER.to_string(), Vec::new());
        for (page, i, labels) in &movies {
            let label = if labels.contains(g) { g.as_str() } else { OTHER };
            classes
                .get_mut(label)
                .unwrap()
                .push(LabeledInstance::new(page.clone(), *i, label)?);
        }
        if classes[g].is_empty() {
            return Err(Error::Dataset(format!("genre {g:?} has no positives")));
        }
        out.insert(
            g.clone(),
            LabeledDataset {
                task: Task::Genre(g.clone()),
                classes,
                cap: 0,
            },
        );
    }
    let smallest = out
        .values()
        .flat_map(|d| d.classes.values().map(Vec::len))
        .min()
        .unwrap_or(0);
    let cap = cap.unwrap_or(smallest);
    for d in out.values_mut() {
        d.cap = check_cap(&d.classes, Some(cap))?;
    }
    Ok(out)
}

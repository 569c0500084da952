//! Labeled, balanced, sampled and split datasets for the event-subtype and
//! movie-genre tasks.

mod build;
mod io;
mod labels;
mod sampling;
mod split;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{NodeId, NodeRecord};

pub use build::{build_event_dataset, build_genre_datasets, EventDatasetStats};
pub use io::{read_dataset, write_dataset, DatasetFile, DatasetHeader};
pub use labels::{
    event_class_frequencies, genre_frequencies, is_genre_predicate, label_event_node,
    label_movie_node, EventLabel, GenreList,
};
pub use sampling::{
    fair_share_allocation, sample, sample_pld_aware, sample_stratified, SamplingStrategy,
};
pub use split::{split_by_pld, split_train_test, DatasetSplit, Provenance};
pub(crate) use split::train_count;

/// Label of the catch-all class.
pub const OTHER: &str = "Other";

pub const EVENT_ROOT: &str = "http://schema.org/Event";
pub const MOVIE_ROOT: &str = "http://schema.org/Movie";
pub const GENRE_PREDICATE: &str = "http://schema.org/genre";

/// A classification task.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    /// Predict the subtype of an `s:Event` node among the top-k subtypes
    /// plus [`OTHER`].
    Events,
    /// Binary: does a movie carry this genre, or is it [`OTHER`].
    Genre(String),
}

impl Task {
    /// Type whose subtypes are generalised in feature keys.
    pub fn root_type(&self) -> &'static str {
        match self {
            Task::Events => EVENT_ROOT,
            Task::Genre(_) => MOVIE_ROOT,
        }
    }

    /// Predicate whose statements must never become features.
    pub fn target_predicate(&self) -> Option<&'static str> {
        match self {
            Task::Events => None,
            Task::Genre(_) => Some(GENRE_PREDICATE),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Events => f.write_str("events"),
            Task::Genre(g) => write!(f, "genre:{g}"),
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "events" => Ok(Task::Events),
            _ => match s.strip_prefix("genre:") {
                Some(g) if !g.is_empty() => Ok(Task::Genre(g.to_string())),
                _ => Err(Error::Invalid(format!(
                    "unknown task {s:?} (expected events or genre:<name>)"
                ))),
            },
        }
    }
}

impl Serialize for Task {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Task {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All nodes extracted from one page.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Page {
    pub url: String,
    pub nodes: Vec<NodeRecord>,
}

/// Pages keyed by URL.
#[derive(Clone, Debug, Default)]
pub struct PageIndex {
    pages: BTreeMap<String, Arc<Page>>,
}

impl PageIndex {
    pub fn build(nodes: Vec<NodeRecord>) -> PageIndex {
        let mut grouped: BTreeMap<String, Vec<NodeRecord>> = BTreeMap::new();
        for n in nodes {
            grouped.entry(n.url.clone()).or_default().push(n);
        }
        PageIndex {
            pages: grouped
                .into_iter()
                .map(|(url, nodes)| (url.clone(), Arc::new(Page { url, nodes })))
                .collect(),
        }
    }

    pub fn from_pages(pages: impl IntoIterator<Item = Page>) -> PageIndex {
        PageIndex {
            pages: pages
                .into_iter()
                .map(|p| (p.url.clone(), Arc::new(p)))
                .collect(),
        }
    }

    pub fn get(&self, url: &str) -> Option<&Arc<Page>> {
        self.pages.get(url)
    }

    pub fn pages(&self) -> impl Iterator<Item = &Arc<Page>> {
        self.pages.values()
    }

    /// Every node with its page, in page-URL then page order.
    pub fn nodes(&self) -> impl Iterator<Item = (&Arc<Page>, usize)> {
        self.pages
            .values()
            .flat_map(|p| (0..p.nodes.len()).map(move |i| (p, i)))
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }
}

/// A node with its class label and the page it appears on.
#[derive(Clone, Debug)]
pub struct LabeledInstance {
    page: Arc<Page>,
    index: usize,
    pub label: String,
}

impl LabeledInstance {
    pub fn new(page: Arc<Page>, index: usize, label: impl Into<String>) -> Result<Self> {
        if index >= page.nodes.len() {
            return Err(Error::Dataset(format!(
                "node index {index} out of range for page {}",
                page.url
            )));
        }
        Ok(LabeledInstance {
            page,
            index,
            label: label.into(),
        })
    }

    /// An instance whose page holds only the node itself.
    pub fn standalone(node: NodeRecord, label: impl Into<String>) -> Self {
        let page = Arc::new(Page {
            url: node.url.clone(),
            nodes: vec![node],
        });
        LabeledInstance {
            page,
            index: 0,
            label: label.into(),
        }
    }

    pub fn node(&self) -> &NodeRecord {
        &self.page.nodes[self.index]
    }

    /// All nodes on the instance's page, the node itself included.
    pub fn page_context(&self) -> &[NodeRecord] {
        &self.page.nodes
    }

    pub fn page(&self) -> &Arc<Page> {
        &self.page
    }

    pub fn id(&self) -> NodeId {
        self.node().id()
    }

    pub fn pld(&self) -> &str {
        &self.node().pld
    }
}

/// Instances grouped by class label (sorted), with the per-class cap that
/// balancing will apply.
#[derive(Clone, Debug)]
pub struct LabeledDataset {
    pub task: Task,
    pub classes: BTreeMap<String, Vec<LabeledInstance>>,
    pub cap: usize,
}

impl LabeledDataset {
    pub fn class_names(&self) -> Vec<String> {
        self.classes.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.classes.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn instances(&self) -> impl Iterator<Item = &LabeledInstance> {
        self.classes.values().flatten()
    }

    pub fn distinct_plds(&self) -> usize {
        let mut plds: Vec<&str> = self.instances().map(|i| i.pld()).collect();
        plds.sort_unstable();
        plds.dedup();
        plds.len()
    }
}

use serde::{Deserialize, Serialize};

use super::node::NodeRecord;
use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

/// Min/max/mean/median of a count distribution. The median of an even-sized
/// multiset is the lower median.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub median: usize,
}

impl Summary {
    pub fn of(mut values: Vec<usize>) -> Summary {
        if values.is_empty() {
            return Summary::default();
        }
        values.sort_unstable();
        let sum: usize = values.iter().sum();
        Summary {
            min: values[0],
            max: values[values.len() - 1],
            mean: sum as f64 / values.len() as f64,
            median: values[(values.len() - 1) / 2],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total_quads: usize,
    pub total_nodes: usize,
    pub quads_per_node: Summary,
    pub distinct_properties_per_node: Summary,
    /// Set when no node matched the type filter.
    pub empty: bool,
}

/// Profile the nodes whose `rdf:type` is `type_filter` or one of its
/// subtypes; all nodes when no filter is given.
pub fn profile_corpus(
    nodes: &[NodeRecord],
    type_filter: Option<&str>,
    vocab: &Vocabulary,
) -> Result<CorpusStats> {
    if let Some(t) = type_filter {
        if !vocab.is_type(t) {
            return Err(Error::UnknownType(t.to_string()));
        }
    }
    let matching: Vec<&NodeRecord> = nodes
        .iter()
        .filter(|n| match type_filter {
            None => true,
            Some(t) => n
                .types()
                .any(|ty| vocab.is_subtype(ty, t).unwrap_or(false)),
        })
        .collect();
    if matching.is_empty() {
        log::warn!("profile: no node matches {:?}", type_filter);
        return Ok(CorpusStats {
            empty: true,
            ..CorpusStats::default()
        });
    }
    let per_node: Vec<usize> = matching.iter().map(|n| n.statements.len()).collect();
    let distinct: Vec<usize> = matching
        .iter()
        .map(|n| {
            let mut preds: Vec<&str> = n.statements.iter().map(|s| s.predicate.as_str()).collect();
            preds.sort_unstable();
            preds.dedup();
            preds.len()
        })
        .collect();
    Ok(CorpusStats {
        total_quads: per_node.iter().sum(),
        total_nodes: matching.len(),
        quads_per_node: Summary::of(per_node),
        distinct_properties_per_node: Summary::of(distinct),
        empty: false,
    })
}

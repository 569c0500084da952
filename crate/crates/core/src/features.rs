//! Feature extraction: pld/tld one-hot, node-vocab and page-vocab frequency
//! blocks, and per-dimension standardisation.
//!
//! Feature keys pair a predicate with the type of the node it describes
//! (`s:Event/name`). Subtypes of the task's root type are generalised to the
//! root, so the key of a `s:MusicEvent` node never names its own label.

use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{is_genre_predicate, LabeledInstance, Task};
use crate::error::{Error, Result};
use crate::ingest::NodeRecord;
use crate::vocab::{local_name, Vocabulary};
use crate::{RDF_TYPE, SCHEMA_NS};

pub const TYPE_KEY: &str = "rdf:type";

fn under_root(t: &str, root: &str, vocab: &Vocabulary) -> bool {
    vocab.is_subtype(t, root).unwrap_or(false)
}

/// Type used to qualify plain predicates of a node: the task root when the
/// node is typed below it, else the lexicographically first most specific
/// known type, else none.
fn key_type(node: &NodeRecord, vocab: &Vocabulary, root: &str) -> Option<String> {
    let known: Vec<&str> = node.types().filter(|t| vocab.is_type(t)).collect();
    if known.iter().any(|t| under_root(t, root, vocab)) {
        return Some(local_name(root).to_string());
    }
    known
        .iter()
        .filter(|t| {
            !known
                .iter()
                .any(|o| o != *t && vocab.is_subtype(o, t).unwrap_or(false))
        })
        .min()
        .map(|t| local_name(t).to_string())
}

fn key_for(predicate: &str, node_type: Option<&str>, vocab: &Vocabulary, task: &Task) -> Option<String> {
    if predicate == RDF_TYPE {
        return Some(TYPE_KEY.to_string());
    }
    let local = predicate.strip_prefix(SCHEMA_NS)?;
    if local.is_empty() || (task.target_predicate().is_some() && is_genre_predicate(predicate)) {
        return None;
    }
    let root = task.root_type();
    match local.rsplit_once('/') {
        Some((ty, prop)) => {
            let full = format!("{SCHEMA_NS}{ty}");
            let ty = if under_root(&full, root, vocab) {
                local_name(root)
            } else {
                ty
            };
            Some(format!("s:{ty}/{prop}"))
        }
        None => Some(match node_type {
            Some(t) => format!("s:{t}/{local}"),
            None => format!("s:{local}"),
        }),
    }
}

/// Feature key of one statement predicate of `node`, or `None` when the
/// predicate is not a feature (non-schema.org, or the task's target).
pub fn feature_key(predicate: &str, node: &NodeRecord, vocab: &Vocabulary, task: &Task) -> Option<String> {
    let t = key_type(node, vocab, task.root_type());
    key_for(predicate, t.as_deref(), vocab, task)
}

/// Feature keys of all statements of a node, with multiplicity.
pub fn node_keys(node: &NodeRecord, vocab: &Vocabulary, task: &Task) -> Vec<String> {
    let t = key_type(node, vocab, task.root_type());
    node.statements
        .iter()
        .filter_map(|s| key_for(&s.predicate, t.as_deref(), vocab, task))
        .collect()
}

fn key_counts<'a>(nodes: impl IntoIterator<Item = &'a NodeRecord>, vocab: &Vocabulary, task: &Task) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for n in nodes {
        for k in node_keys(n, vocab, task) {
            *counts.entry(k).or_default() += 1;
        }
    }
    counts
}

/// Which blocks a feature space includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureBlocks {
    pub pld_tld: bool,
    pub node_vocab: bool,
    pub page_vocab: bool,
}

impl Default for FeatureBlocks {
    fn default() -> Self {
        FeatureBlocks {
            pld_tld: true,
            node_vocab: true,
            page_vocab: true,
        }
    }
}

/// Dimension layout learned from training instances: pld, tld, node-vocab
/// and page-vocab blocks, in that order. Node and page blocks share the term
/// dictionary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    pub task: Task,
    pub blocks: FeatureBlocks,
    pub pld_index: BTreeMap<String, usize>,
    pub tld_index: BTreeMap<String, usize>,
    pub term_index: BTreeMap<String, usize>,
}

fn enumerate(keys: impl IntoIterator<Item = String>) -> BTreeMap<String, usize> {
    let mut sorted: Vec<String> = keys.into_iter().collect();
    sorted.sort();
    sorted.dedup();
    sorted.into_iter().enumerate().map(|(i, k)| (k, i)).collect()
}

impl FeatureSpace {
    /// Build from training instances only; dimensions follow lexicographic
    /// key order.
    pub fn build(train: &[LabeledInstance], vocab: &Vocabulary, task: &Task, blocks: FeatureBlocks) -> Result<FeatureSpace> {
        if train.is_empty() {
            return Err(Error::Dataset("cannot build a feature space from an empty training set".into()));
        }
        let (pld_index, tld_index) = if blocks.pld_tld {
            (
                enumerate(train.iter().map(|i| i.node().pld.clone())),
                enumerate(train.iter().map(|i| i.node().tld.clone()).filter(|t| !t.is_empty())),
            )
        } else {
            Default::default()
        };
        let mut terms: Vec<String> = Vec::new();
        if blocks.node_vocab || blocks.page_vocab {
            let mut seen_pages = std::collections::BTreeSet::new();
            for inst in train {
                if blocks.node_vocab {
                    terms.extend(node_keys(inst.node(), vocab, task));
                }
                if blocks.page_vocab && seen_pages.insert(inst.page().url.as_str()) {
                    terms.extend(key_counts(inst.page_context(), vocab, task).into_keys());
                }
            }
        }
        Ok(FeatureSpace {
            task: task.clone(),
            blocks,
            pld_index,
            tld_index,
            term_index: enumerate(terms),
        })
    }

    fn term_block(&self, on: bool) -> usize {
        if on {
            self.term_index.len()
        } else {
            0
        }
    }

    pub fn pld_range(&self) -> Range<usize> {
        0..self.pld_index.len()
    }

    pub fn tld_range(&self) -> Range<usize> {
        let s = self.pld_index.len();
        s..s + self.tld_index.len()
    }

    pub fn node_range(&self) -> Range<usize> {
        let s = self.tld_range().end;
        s..s + self.term_block(self.blocks.node_vocab)
    }

    pub fn page_range(&self) -> Range<usize> {
        let s = self.node_range().end;
        s..s + self.term_block(self.blocks.page_vocab)
    }

    pub fn dim(&self) -> usize {
        self.page_range().end
    }

    /// Human-readable name of a dimension.
    pub fn dimension_name(&self, d: usize) -> String {
        let find = |m: &BTreeMap<String, usize>, i: usize| {
            m.iter().find(|(_, &v)| v == i).map(|(k, _)| k.clone()).unwrap_or_default()
        };
        if self.pld_range().contains(&d) {
            format!("pld={}", find(&self.pld_index, d))
        } else if self.tld_range().contains(&d) {
            format!("tld={}", find(&self.tld_index, d - self.tld_range().start))
        } else if self.node_range().contains(&d) {
            format!("node:{}", find(&self.term_index, d - self.node_range().start))
        } else {
            format!("page:{}", find(&self.term_index, d - self.page_range().start))
        }
    }

    /// L2-normalised counts of in-dictionary keys, as sparse entries offset
    /// into the block starting at `offset`.
    fn vocab_block(&self, counts: BTreeMap<String, usize>, offset: usize) -> Vec<(usize, f64)> {
        let mut entries: Vec<(usize, f64)> = counts
            .into_iter()
            .filter_map(|(k, c)| self.term_index.get(&k).map(|&i| (offset + i, c as f64)))
            .collect();
        let norm = entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for e in &mut entries {
                e.1 /= norm;
            }
        }
        entries.sort_by_key(|e| e.0);
        entries
    }

    /// Node-vocab block of a node.
    pub fn node_vocab(&self, node: &NodeRecord, vocab: &Vocabulary) -> Vec<(usize, f64)> {
        self.vocab_block(key_counts([node], vocab, &self.task), self.node_range().start)
    }

    /// Page-vocab block: counts pooled over every node on the page.
    pub fn page_vocab(&self, page: &[NodeRecord], vocab: &Vocabulary) -> Vec<(usize, f64)> {
        self.vocab_block(key_counts(page, vocab, &self.task), self.page_range().start)
    }

    /// Unstandardised feature vector of a node in its page context.
    pub fn featurize(&self, node: &NodeRecord, page: &[NodeRecord], vocab: &Vocabulary) -> FeatureVector {
        let mut entries = Vec::new();
        if let Some(&i) = self.pld_index.get(&node.pld) {
            entries.push((i, 1.0));
        }
        if let Some(&i) = self.tld_index.get(&node.tld) {
            entries.push((self.tld_range().start + i, 1.0));
        }
        if self.blocks.node_vocab {
            entries.extend(self.node_vocab(node, vocab));
        }
        if self.blocks.page_vocab {
            entries.extend(self.page_vocab(page, vocab));
        }
        FeatureVector {
            dim: self.dim(),
            entries,
        }
    }

    pub fn featurize_instance(&self, inst: &LabeledInstance, vocab: &Vocabulary) -> FeatureVector {
        self.featurize(inst.node(), inst.page_context(), vocab)
    }

    pub fn featurize_all(&self, instances: &[LabeledInstance], vocab: &Vocabulary) -> Vec<FeatureVector> {
        instances
            .par_iter()
            .map(|i| self.featurize_instance(i, vocab))
            .collect()
    }
}

/// Sparse vector: `(dimension, value)` pairs in increasing dimension order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl FeatureVector {
    pub fn dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &(i, x) in &self.entries {
            v[i] = x;
        }
        v
    }

    /// L2 norm of the entries falling in `range`.
    pub fn block_norm(&self, range: Range<usize>) -> f64 {
        self.entries
            .iter()
            .filter(|(i, _)| range.contains(i))
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Rows selected by index, in the given order.
    pub fn select(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Per-dimension mean and population standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    #[serde(with = "crate::learn::num::vec")]
    pub mean: Vec<f64>,
    #[serde(with = "crate::learn::num::vec")]
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Fit on training vectors. Zero-variance dimensions get σ = 1.
    pub fn fit(vectors: &[FeatureVector], dim: usize) -> Result<Standardizer> {
        if vectors.is_empty() {
            return Err(Error::Dataset("cannot fit a standardizer on no vectors".into()));
        }
        let n = vectors.len() as f64;
        let mut sum = vec![0.0; dim];
        let mut nnz = vec![0usize; dim];
        for v in vectors {
            if v.dim != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: v.dim,
                });
            }
            for &(i, x) in &v.entries {
                sum[i] += x;
                nnz[i] += 1;
            }
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
        let mut sq = vec![0.0; dim];
        for v in vectors {
            for &(i, x) in &v.entries {
                sq[i] += (x - mean[i]).powi(2);
            }
        }
        let std = (0..dim)
            .map(|i| {
                let zeros = vectors.len() - nnz[i];
                let var = (sq[i] + zeros as f64 * mean[i] * mean[i]) / n;
                let s = var.sqrt();
                if s > 1e-12 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        if v.dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.dim,
            });
        }
        let mut out: Vec<f64> = self.mean.iter().zip(&self.std).map(|(m, s)| -m / s).collect();
        for &(i, x) in &v.entries {
            out[i] = (x - self.mean[i]) / self.std[i];
        }
        Ok(out)
    }

    pub fn transform_all(&self, vectors: &[FeatureVector]) -> Result<Matrix> {
        let mut m = Matrix::zeros(vectors.len(), self.dim());
        for (r, v) in vectors.iter().enumerate() {
            let row = self.transform(v)?;
            m.row_mut(r).copy_from_slice(&row);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Page, GENRE_PREDICATE, MOVIE_ROOT};
    use crate::ingest::{Statement, Term};
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn st(p: &str, o: Term) -> Statement {
        Statement {
            predicate: p.into(),
            object: o,
        }
    }

    fn rec(subject: &str, statements: Vec<Statement>) -> NodeRecord {
        NodeRecord {
            subject: Term::Blank(subject.into()),
            url: "https://gdssummits.com/nghealthcare/us/".into(),
            pld: "gdssummits.com".into(),
            tld: ".com".into(),
            statements,
        }
    }

    fn example_node() -> NodeRecord {
        rec(
            "node3957c770b4f7c0bd1a17805dd8ca406",
            vec![
                st(RDF_TYPE, Term::iri("http://schema.org/BusinessEvent")),
                st("http://schema.org/Event/name", Term::lang_literal("NG Healthcare Summit US", "en")),
                st(
                    "http://schema.org/Event/location",
                    Term::lang_literal("Omni Barton Creek Resort & Spa, Austin, Texas", "en"),
                ),
            ],
        )
    }

    fn example_page() -> Vec<NodeRecord> {
        vec![
            example_node(),
            rec(
                "nodea9ff152514bcfb63c2714bc1336b2b3",
                vec![st("http://schema.org/Organization/url", Term::iri("http://www.gdsinternational.com"))],
            ),
            rec(
                "node4ccbf7f34c95f14168f5fdb47b73ab",
                vec![st(RDF_TYPE, Term::iri("http://schema.org/BusinessEvent"))],
            ),
        ]
    }

    fn space_for(page: Vec<NodeRecord>, task: Task) -> (FeatureSpace, LabeledInstance) {
        let page = Arc::new(Page {
            url: page[0].url.clone(),
            nodes: page,
        });
        let inst = LabeledInstance::new(page, 0, "Other").unwrap();
        let space = FeatureSpace::build(std::slice::from_ref(&inst), Vocabulary::bundled(), &task, FeatureBlocks::default()).unwrap();
        (space, inst)
    }

    fn named(space: &FeatureSpace, block: &[(usize, f64)], offset: usize) -> BTreeMap<String, f64> {
        block
            .iter()
            .map(|(i, v)| {
                let k = space.term_index.iter().find(|(_, &j)| j == i - offset).unwrap().0.clone();
                (k, *v)
            })
            .collect()
    }

    #[test]
    fn example_node_keys() {
        let v = Vocabulary::bundled();
        let keys: Vec<_> = node_keys(&example_node(), v, &Task::Events);
        assert_eq!(keys, vec!["rdf:type", "s:Event/name", "s:Event/location"]);
    }

    #[test]
    fn composite_subtypes_are_generalised() {
        let v = Vocabulary::bundled();
        let n = rec("x", vec![]);
        assert_eq!(
            feature_key("http://schema.org/BusinessEvent/name", &n, v, &Task::Events).as_deref(),
            Some("s:Event/name")
        );
        assert_eq!(
            feature_key("http://schema.org/Organization/url", &n, v, &Task::Events).as_deref(),
            Some("s:Organization/url")
        );
        assert_eq!(feature_key("http://ogp.me/ns#title", &n, v, &Task::Events), None);
    }

    #[test]
    fn plain_predicates_take_the_node_type() {
        let v = Vocabulary::bundled();
        let music = rec("m", vec![st(RDF_TYPE, Term::iri("http://schema.org/MusicEvent"))]);
        assert_eq!(
            feature_key("http://schema.org/name", &music, v, &Task::Events).as_deref(),
            Some("s:Event/name")
        );
        let place = rec(
            "p",
            vec![
                st(RDF_TYPE, Term::iri("http://schema.org/Place")),
                st(RDF_TYPE, Term::iri("http://schema.org/Place")),
                st(RDF_TYPE, Term::iri("http://schema.org/LocalBusiness")),
            ],
        );
        // LocalBusiness is below Place, so it is the most specific type
        assert_eq!(
            feature_key("http://schema.org/name", &place, v, &Task::Events).as_deref(),
            Some("s:LocalBusiness/name")
        );
        let bare = rec("b", vec![]);
        assert_eq!(
            feature_key("http://schema.org/name", &bare, v, &Task::Events).as_deref(),
            Some("s:name")
        );
    }

    #[test]
    fn genre_is_excluded_for_the_genre_task() {
        let v = Vocabulary::bundled();
        let movie = rec("m", vec![st(RDF_TYPE, Term::iri(MOVIE_ROOT))]);
        let task = Task::Genre("Drama".into());
        assert_eq!(feature_key(GENRE_PREDICATE, &movie, v, &task), None);
        assert_eq!(feature_key("http://schema.org/Movie/genre", &movie, v, &task), None);
        assert_eq!(
            feature_key("http://schema.org/name", &movie, v, &task).as_deref(),
            Some("s:Movie/name")
        );
        assert_eq!(
            feature_key(GENRE_PREDICATE, &movie, v, &Task::Events).as_deref(),
            Some("s:Movie/genre")
        );
    }

    #[test]
    fn example_vocab_blocks() {
        let v = Vocabulary::bundled();
        let (space, inst) = space_for(example_page(), Task::Events);
        let node = space.node_vocab(inst.node(), v);
        let node = named(&space, &node, space.node_range().start);
        let r3 = 1.0 / 3f64.sqrt();
        assert_eq!(node.len(), 3);
        for k in ["rdf:type", "s:Event/name", "s:Event/location"] {
            assert!((node[k] - r3).abs() < 1e-15, "{k}");
        }
        let page = space.page_vocab(inst.page_context(), v);
        let page = named(&space, &page, space.page_range().start);
        let norm = 7f64.sqrt();
        assert!((page["rdf:type"] - 2.0 / norm).abs() < 1e-15);
        for k in ["s:Event/name", "s:Event/location", "s:Organization/url"] {
            assert!((page[k] - 1.0 / norm).abs() < 1e-15, "{k}");
        }
        let fv = space.featurize_instance(&inst, v);
        assert!((fv.block_norm(space.node_range()) - 1.0).abs() < 1e-12);
        assert!((fv.block_norm(space.page_range()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_type_statement() {
        let v = Vocabulary::bundled();
        let n = rec(
            "n",
            vec![
                st(RDF_TYPE, Term::iri("http://schema.org/Event")),
                st(RDF_TYPE, Term::iri("http://schema.org/Event")),
                st("http://schema.org/name", Term::literal("x")),
            ],
        );
        let (space, inst) = space_for(vec![n], Task::Events);
        let block = named(&space, &space.node_vocab(inst.node(), v), space.node_range().start);
        assert!((block["rdf:type"] - 2.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((block["s:Event/name"] - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        // single-node page: page block mirrors the node block
        let fv = space.featurize_instance(&inst, v);
        let d = fv.dense();
        let (nr, pr) = (space.node_range(), space.page_range());
        assert_eq!(d[nr], d[pr]);
    }

    #[test]
    fn layout_and_unseen_values() {
        let v = Vocabulary::bundled();
        let mk = |pld: &str, tld: &str| {
            let mut n = rec("n", vec![st("http://schema.org/name", Term::literal("x"))]);
            n.pld = pld.into();
            n.tld = tld.into();
            n.url = format!("http://{pld}/");
            LabeledInstance::standalone(n, "A")
        };
        let train = vec![mk("a.com", ".com"), mk("b.org", ".org")];
        let s1 = FeatureSpace::build(&train, v, &Task::Events, FeatureBlocks::default()).unwrap();
        let s2 = FeatureSpace::build(&train, v, &Task::Events, FeatureBlocks::default()).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.pld_range().len(), 2);
        assert_eq!(s1.tld_range().len(), 2);
        assert_eq!(s1.dim(), 2 + 2 + 1 + 1);
        let unseen = s1.featurize_instance(&mk("c.net", ".net"), v);
        assert_eq!(unseen.block_norm(0..4), 0.0);
        assert!(FeatureSpace::build(&[], v, &Task::Events, FeatureBlocks::default()).is_err());
    }

    #[test]
    fn page_vector_ignores_node_order() {
        let v = Vocabulary::bundled();
        let (space, inst) = space_for(example_page(), Task::Events);
        let mut reversed = example_page();
        reversed.reverse();
        assert_eq!(space.page_vocab(inst.page_context(), v), space.page_vocab(&reversed, v));
    }

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector {
            dim: values.len(),
            entries: values.iter().copied().enumerate().filter(|(_, x)| *x != 0.0).collect(),
        }
    }

    #[test]
    fn standardizer_examples() {
        let s = Standardizer::fit(&[fv(&[0.5]), fv(&[0.5])], 1).unwrap();
        assert_eq!(s.std, vec![1.0]);
        assert_eq!(s.transform(&fv(&[0.5])).unwrap(), vec![0.0]);
        let s = Standardizer::fit(&[fv(&[0.0]), fv(&[2.0])], 1).unwrap();
        assert_eq!((s.mean[0], s.std[0]), (1.0, 1.0));
        assert_eq!(s.transform(&fv(&[0.0])).unwrap(), vec![-1.0]);
        assert_eq!(s.transform(&fv(&[2.0])).unwrap(), vec![1.0]);
        assert!(matches!(s.transform(&fv(&[1.0, 2.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn standardized_columns_have_unit_moments() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<FeatureVector> = (0..50)
            .map(|_| fv(&(0..20).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(-3.0..5.0) }).collect::<Vec<_>>()))
            .collect();
        let s = Standardizer::fit(&rows, 20).unwrap();
        let m = s.transform_all(&rows).unwrap();
        for j in 0..20 {
            let col: Vec<f64> = (0..50).map(|i| m.get(i, j)).collect();
            let mean = col.iter().sum::<f64>() / 50.0;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 50.0;
            assert!(mean.abs() < 1e-9);
            assert!((var - 1.0).abs() < 1e-9);
        }
    }
}

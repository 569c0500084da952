//! The schema.org vocabulary: types with their hierarchy, properties with
//! domains and ranges, and the canonical casing of every term.
//!
//! Types and properties are canonicalised separately because schema.org has
//! many type/property pairs that differ only in case (`Event`/`event`,
//! `Review`/`review`); the position of a term in a statement decides which
//! table applies.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SCHEMA_NS;

static BUNDLED: &str = include_str!("../data/schemaorg.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TypeDef {
    pub iri: String,
    #[serde(default)]
    pub parents: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyDef {
    pub iri: String,
    #[serde(default)]
    pub domain: Vec<String>,
    #[serde(default)]
    pub range: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Snapshot {
    #[serde(default)]
    version: Option<String>,
    types: Vec<TypeDef>,
    properties: Vec<PropertyDef>,
}

#[derive(Clone, Debug)]
pub struct Vocabulary {
    version: String,
    parents: BTreeMap<String, Vec<String>>,
    domain_of: BTreeMap<String, BTreeSet<String>>,
    range_of: BTreeMap<String, BTreeSet<String>>,
    type_case: HashMap<String, String>,
    property_case: HashMap<String, String>,
}

/// Local name of a schema.org IRI (`http://schema.org/MusicEvent` →
/// `MusicEvent`); other IRIs are returned unchanged.
pub fn local_name(iri: &str) -> &str {
    iri.strip_prefix(SCHEMA_NS).unwrap_or(iri)
}

impl Vocabulary {
    /// The pinned snapshot shipped with the crate.
    pub fn bundled() -> &'static Vocabulary {
        static VOCAB: OnceLock<Vocabulary> = OnceLock::new();
        VOCAB.get_or_init(|| Vocabulary::from_json(BUNDLED).expect("bundled vocabulary is valid"))
    }

    pub fn load(path: &Path) -> Result<Vocabulary> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Vocabulary> {
        let snapshot: Snapshot =
            serde_json::from_str(text).map_err(|e| Error::Vocabulary(e.to_string()))?;
        Self::from_snapshot(snapshot)
    }

    fn from_snapshot(s: Snapshot) -> Result<Vocabulary> {
        let mut parents = BTreeMap::new();
        let mut type_case = HashMap::new();
        for t in &s.types {
            if t.iri.is_empty() {
                return Err(Error::Vocabulary("empty type IRI".into()));
            }
            if let Some(prev) = type_case.insert(t.iri.to_lowercase(), t.iri.clone()) {
                return Err(Error::Vocabulary(format!(
                    "duplicate canonical key for types <{prev}> and <{}>",
                    t.iri
                )));
            }
            parents.insert(t.iri.clone(), t.parents.clone());
        }
        for (t, ps) in &parents {
            for p in ps {
                if !parents.contains_key(p) {
                    return Err(Error::Vocabulary(format!(
                        "type <{t}> has unknown parent <{p}>"
                    )));
                }
            }
        }
        check_acyclic(&parents)?;

        let mut property_case = HashMap::new();
        let mut domain_of = BTreeMap::new();
        let mut range_of = BTreeMap::new();
        for p in &s.properties {
            if p.iri.is_empty() {
                return Err(Error::Vocabulary("empty property IRI".into()));
            }
            if let Some(prev) = property_case.insert(p.iri.to_lowercase(), p.iri.clone()) {
                return Err(Error::Vocabulary(format!(
                    "duplicate canonical key for properties <{prev}> and <{}>",
                    p.iri
                )));
            }
            for t in p.domain.iter().chain(&p.range) {
                if !parents.contains_key(t) {
                    return Err(Error::Vocabulary(format!(
                        "property <{}> references unknown type <{t}>",
                        p.iri
                    )));
                }
            }
            domain_of.insert(p.iri.clone(), p.domain.iter().cloned().collect());
            range_of.insert(p.iri.clone(), p.range.iter().cloned().collect());
        }
        Ok(Vocabulary {
            version: s.version.unwrap_or_else(|| "unversioned".into()),
            parents,
            domain_of,
            range_of,
            type_case,
            property_case,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn is_type(&self, iri: &str) -> bool {
        self.parents.contains_key(iri)
    }

    pub fn is_property(&self, iri: &str) -> bool {
        self.domain_of.contains_key(iri)
    }

    pub fn types(&self) -> impl Iterator<Item = &str> {
        self.parents.keys().map(String::as_str)
    }

    pub fn properties(&self) -> impl Iterator<Item = &str> {
        self.domain_of.keys().map(String::as_str)
    }

    pub fn parents(&self, t: &str) -> Option<&[String]> {
        self.parents.get(t).map(Vec::as_slice)
    }

    pub fn domain_of(&self, property: &str) -> Option<&BTreeSet<String>> {
        self.domain_of.get(property)
    }

    pub fn range_of(&self, property: &str) -> Option<&BTreeSet<String>> {
        self.range_of.get(property)
    }

    /// Reflexive, transitive subtype test.
    pub fn is_subtype(&self, t1: &str, t2: &str) -> Result<bool> {
        if !self.is_type(t1) {
            return Err(Error::UnknownType(t1.to_string()));
        }
        if !self.is_type(t2) {
            return Err(Error::UnknownType(t2.to_string()));
        }
        let mut stack = vec![t1];
        let mut seen = BTreeSet::new();
        while let Some(t) = stack.pop() {
            if t == t2 {
                return Ok(true);
            }
            if seen.insert(t) {
                stack.extend(self.parents[t].iter().map(String::as_str));
            }
        }
        Ok(false)
    }

    /// Types without parents reachable from `t` (including `t` itself when it
    /// is a root).
    pub fn roots_of(&self, t: &str) -> Vec<&str> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<&str> = self.parents.get_key_value(t).map(|(k, _)| k.as_str()).into_iter().collect();
        let mut seen = BTreeSet::new();
        while let Some(t) = stack.pop() {
            if !seen.insert(t) {
                continue;
            }
            match self.parents.get(t) {
                Some(ps) if ps.is_empty() => {
                    out.insert(t);
                }
                Some(ps) => stack.extend(ps.iter().map(String::as_str)),
                None => {}
            }
        }
        out.into_iter().collect()
    }

    /// Direct subtypes of `t`, sorted.
    pub fn direct_subtypes(&self, t: &str) -> Vec<&str> {
        self.parents
            .iter()
            .filter(|(_, ps)| ps.iter().any(|p| p == t))
            .map(|(c, _)| c.as_str())
            .collect()
    }

    /// All proper descendants of `t`, sorted.
    pub fn proper_subtypes(&self, t: &str) -> Vec<&str> {
        self.parents
            .keys()
            .filter(|c| c.as_str() != t && self.is_subtype(c, t).unwrap_or(false))
            .map(String::as_str)
            .collect()
    }

    pub fn canonical_type(&self, raw: &str) -> Option<&str> {
        self.type_case.get(&raw.to_lowercase()).map(String::as_str)
    }

    pub fn canonical_property(&self, raw: &str) -> Option<&str> {
        self.property_case.get(&raw.to_lowercase()).map(String::as_str)
    }

    /// Canonical IRI of a term whose position is unknown. An exact match
    /// wins; when a type and a property share the lowercased key the case of
    /// the first letter of the local name decides.
    pub fn canonical_term(&self, raw: &str) -> Option<&str> {
        if let Some(t) = self.type_case.get(&raw.to_lowercase()) {
            if t == raw {
                return Some(t);
            }
        }
        if let Some(p) = self.property_case.get(&raw.to_lowercase()) {
            if p == raw {
                return Some(p);
            }
        }
        match (self.canonical_type(raw), self.canonical_property(raw)) {
            (Some(t), None) => Some(t),
            (None, Some(p)) => Some(p),
            (None, None) => None,
            (Some(t), Some(p)) => {
                let upper = local_name(raw)
                    .rsplit('/')
                    .next()
                    .and_then(|s| s.chars().next())
                    .is_some_and(char::is_uppercase);
                Some(if upper { t } else { p })
            }
        }
    }

    /// Canonical form of a predicate, including WDC-style composite
    /// predicates `<Type>/<property>` whose parts are canonicalised
    /// independently.
    pub fn canonical_predicate(&self, raw: &str) -> Option<String> {
        if let Some(p) = self.canonical_property(raw) {
            return Some(p.to_string());
        }
        let local = raw.get(SCHEMA_NS.len()..)?;
        if !raw[..SCHEMA_NS.len()].eq_ignore_ascii_case(SCHEMA_NS) {
            return None;
        }
        let (ty, prop) = local.rsplit_once('/')?;
        let ty = self.canonical_type(&format!("{SCHEMA_NS}{ty}"))?;
        let prop = self.canonical_property(&format!("{SCHEMA_NS}{prop}"))?;
        Some(format!("{ty}/{}", local_name(prop)))
    }
}

fn check_acyclic(parents: &BTreeMap<String, Vec<String>>) -> Result<()> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: HashMap<&str, Mark> = HashMap::new();
    for start in parents.keys() {
        if marks.contains_key(start.as_str()) {
            continue;
        }
        // iterative DFS: (node, index of next parent to visit)
        let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
        marks.insert(start, Mark::Open);
        while let Some((node, i)) = stack.pop() {
            let ps = &parents[node];
            if i < ps.len() {
                stack.push((node, i + 1));
                let next = ps[i].as_str();
                match marks.get(next) {
                    Some(Mark::Open) => {
                        return Err(Error::Vocabulary(format!(
                            "hierarchy cycle through <{next}>"
                        )))
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(next, Mark::Open);
                        stack.push((next, 0));
                    }
                }
            } else {
                marks.insert(node, Mark::Done);
            }
        }
    }
    Ok(())
}

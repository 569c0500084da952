use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::domain::SuffixList;
use super::quad::{Quad, Term};
use crate::error::{Error, Result};
use crate::RDF_TYPE;

/// A node is identified by its subject label together with the page it was
/// extracted from; blank node labels are only page-scoped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId {
    pub subject: String,
    pub url: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "StatementJson", try_from = "StatementJson")]
pub struct Statement {
    pub predicate: String,
    pub object: Term,
}

#[derive(Serialize, Deserialize)]
struct StatementJson {
    p: String,
    o_kind: String,
    o: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    lang: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    dt: Option<String>,
}

impl From<Statement> for StatementJson {
    fn from(s: Statement) -> Self {
        let (o_kind, o, lang, dt) = match s.object {
            Term::Iri(i) => ("iri", i, None, None),
            Term::Blank(b) => ("bnode", format!("_:{b}"), None, None),
            Term::Literal {
                value,
                lang,
                datatype,
            } => ("literal", value, lang, datatype),
        };
        StatementJson {
            p: s.predicate,
            o_kind: o_kind.into(),
            o,
            lang,
            dt,
        }
    }
}

impl TryFrom<StatementJson> for Statement {
    type Error = String;

    fn try_from(j: StatementJson) -> std::result::Result<Self, String> {
        let object = match j.o_kind.as_str() {
            "iri" => Term::Iri(j.o),
            "bnode" => Term::Blank(j.o.strip_prefix("_:").unwrap_or(&j.o).to_string()),
            "literal" => Term::Literal {
                value: j.o,
                lang: j.lang,
                datatype: j.dt,
            },
            other => return Err(format!("unknown o_kind {other:?}")),
        };
        Ok(Statement {
            predicate: j.p,
            object,
        })
    }
}

/// All outgoing statements of one subject on one page.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeRecord {
    #[serde(with = "subject_label")]
    pub subject: Term,
    pub url: String,
    pub pld: String,
    pub tld: String,
    pub statements: Vec<Statement>,
}

mod subject_label {
    use super::Term;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &Term, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.label())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Term, D::Error> {
        let label = String::deserialize(d)?;
        Ok(Term::from_subject_label(&label))
    }
}

impl NodeRecord {
    pub fn id(&self) -> NodeId {
        NodeId {
            subject: self.subject.label(),
            url: self.url.clone(),
        }
    }

    /// IRIs of all `rdf:type` objects, in statement order.
    pub fn types(&self) -> impl Iterator<Item = &str> {
        self.statements
            .iter()
            .filter(|s| s.predicate == RDF_TYPE)
            .filter_map(|s| s.object.as_iri())
    }

    /// Literal values of all statements with the given predicate.
    pub fn literals<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a Term> + 'a {
        self.statements
            .iter()
            .filter(move |s| s.predicate == predicate)
            .map(|s| &s.object)
            .filter(|o| matches!(o, Term::Literal { .. }))
    }

    /// Back to quads, in statement order.
    pub fn to_quads(&self) -> impl Iterator<Item = Quad> + '_ {
        self.statements.iter().map(|s| Quad {
            subject: self.subject.clone(),
            predicate: s.predicate.clone(),
            object: s.object.clone(),
            source_url: self.url.clone(),
        })
    }
}

/// Group quads by `(subject, source_url)`.
///
/// Records appear in order of first occurrence and statements keep input
/// order, so every quad lands in exactly one record.
pub fn assemble_nodes<I>(quads: I, suffixes: &SuffixList) -> Vec<NodeRecord>
where
    I: IntoIterator<Item = Quad>,
{
    let mut index: HashMap<(Term, String), usize> = HashMap::new();
    let mut domains: HashMap<String, (String, String)> = HashMap::new();
    let mut nodes: Vec<NodeRecord> = Vec::new();
    for q in quads {
        let key = (q.subject, q.source_url);
        let slot = match index.get(&key) {
            Some(&i) => i,
            None => {
                let (pld, tld) = domains
                    .entry(key.1.clone())
                    .or_insert_with(|| match suffixes.extract(&key.1) {
                        Ok(p) => (p.pld, p.tld),
                        Err(_) => (String::new(), String::new()),
                    })
                    .clone();
                nodes.push(NodeRecord {
                    subject: key.0.clone(),
                    url: key.1.clone(),
                    pld,
                    tld,
                    statements: Vec::new(),
                });
                index.insert(key.clone(), nodes.len() - 1);
                nodes.len() - 1
            }
        };
        nodes[slot].statements.push(Statement {
            predicate: q.predicate,
            object: q.object,
        });
    }
    nodes
}

pub fn write_nodes_jsonl<W: Write>(nodes: &[NodeRecord], mut out: W) -> Result<()> {
    for n in nodes {
        serde_json::to_writer(&mut out, n)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_nodes_jsonl<R: BufRead>(input: R) -> Result<Vec<NodeRecord>> {
    let mut nodes = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        nodes.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i as u64 + 1,
            message: e.to_string(),
        })?);
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_nquads;
    use crate::ingest::ErrorPolicy;

    const EXAMPLE_NODE: &str = r#"_:node3957 <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://schema.org/BusinessEvent> <https://gdssummits.com/nghealthcare/us/> .
_:node3957 <http://schema.org/Event/name> "NG Healthcare Summit US"@en <https://gdssummits.com/nghealthcare/us/> .
_:node3957 <http://schema.org/Event/location> "Omni Barton Creek Resort & Spa, Austin, Texas"@en <https://gdssummits.com/nghealthcare/us/> .
"#;

    fn quads(text: &str) -> Vec<Quad> {
        parse_nquads(text.as_bytes(), ErrorPolicy::Abort).unwrap().0
    }

    #[test]
    fn example_node_is_one_record() {
        let nodes = assemble_nodes(quads(EXAMPLE_NODE), SuffixList::bundled());
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].statements.len(), 3);
        assert_eq!(nodes[0].pld, "gdssummits.com");
        assert_eq!(nodes[0].tld, ".com");
        assert_eq!(nodes[0].types().collect::<Vec<_>>(), ["http://schema.org/BusinessEvent"]);
    }

    #[test]
    fn same_label_on_different_pages_is_two_nodes() {
        let text = "_:b0 <http://schema.org/name> \"a\" <http://a.com/1> .\n\
                    _:b0 <http://schema.org/name> \"b\" <http://a.com/2> .\n";
        let nodes = assemble_nodes(quads(text), SuffixList::bundled());
        assert_eq!(nodes.len(), 2);
    }

    #[test]
    fn jsonl_round_trip() {
        let nodes = assemble_nodes(quads(EXAMPLE_NODE), SuffixList::bundled());
        let mut buf = Vec::new();
        write_nodes_jsonl(&nodes, &mut buf).unwrap();
        let line = String::from_utf8(buf.clone()).unwrap();
        assert!(line.starts_with(r#"{"subject":"_:node3957","url":"https://gdssummits.com/nghealthcare/us/""#));
        assert!(line.contains(r#""o_kind":"literal""#));
        assert!(line.contains(r#""lang":"en""#));
        let back = read_nodes_jsonl(&buf[..]).unwrap();
        assert_eq!(back, nodes);
    }
}

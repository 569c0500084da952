//! Repair of common markup errors in vocabulary terms: wrong schema.org
//! namespaces and wrong capitalisation. Literal objects are never touched.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::{Quad, Term};
use crate::vocab::Vocabulary;
use crate::{RDF_TYPE, SCHEMA_NS};

/// What happens to quads whose predicate (or `rdf:type` object) is still
/// undefined after fixing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UndefinedPolicy {
    #[default]
    Drop,
    Keep,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleansingReport {
    pub quads_in: usize,
    pub quads_out: usize,
    pub namespace_fixes: usize,
    pub casing_fixes: usize,
    pub dropped_undefined: usize,
    pub flagged_undefined: usize,
}

impl CleansingReport {
    fn merge(mut self, other: CleansingReport) -> CleansingReport {
        self.quads_in += other.quads_in;
        self.quads_out += other.quads_out;
        self.namespace_fixes += other.namespace_fixes;
        self.casing_fixes += other.casing_fixes;
        self.dropped_undefined += other.dropped_undefined;
        self.flagged_undefined += other.flagged_undefined;
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct Cleansed {
    pub quads: Vec<Quad>,
    /// Parallel to `quads`: true for quads kept despite an undefined term
    /// (only under [`UndefinedPolicy::Keep`]).
    pub undefined: Vec<bool>,
    pub report: CleansingReport,
}

/// Normalise a schema.org namespace: `https` to `http`, drop anything between
/// the scheme and `schema.org` (such as `www.`), insert a missing slash after
/// the host and lowercase the host. Other IRIs pass through unchanged.
pub fn fix_namespace(iri: &str) -> String {
    let lower = iri.to_ascii_lowercase();
    let scheme_len = if lower.starts_with("https://") {
        8
    } else if lower.starts_with("http://") {
        7
    } else {
        return iri.to_string();
    };
    let rest = &iri[scheme_len..];
    let rest_lower = &lower[scheme_len..];
    let Some(at) = rest_lower.find("schema.org") else {
        return iri.to_string();
    };
    let prefix = &rest_lower[..at];
    if prefix.contains('/') || !(prefix.is_empty() || prefix.ends_with('.')) {
        return iri.to_string();
    }
    let tail = &rest[at + "schema.org".len()..];
    if tail.starts_with('.') || tail.starts_with(':') {
        // a different host, or an explicit port
        return iri.to_string();
    }
    let tail = tail.strip_prefix('/').unwrap_or(tail);
    format!("{SCHEMA_NS}{tail}")
}

#[derive(Default)]
struct QuadOutcome {
    quad: Option<Quad>,
    undefined: bool,
    report: CleansingReport,
}

fn cleanse_one(mut q: Quad, vocab: &Vocabulary, policy: UndefinedPolicy) -> QuadOutcome {
    let mut report = CleansingReport {
        quads_in: 1,
        ..Default::default()
    };
    let mut undefined = false;

    if q.predicate != RDF_TYPE {
        let fixed = fix_namespace(&q.predicate);
        if fixed != q.predicate {
            report.namespace_fixes += 1;
        }
        if fixed.starts_with(SCHEMA_NS) {
            match vocab.canonical_predicate(&fixed) {
                Some(c) => {
                    if c != fixed {
                        report.casing_fixes += 1;
                    }
                    q.predicate = c;
                }
                None => {
                    undefined = true;
                    q.predicate = fixed;
                }
            }
        } else {
            q.predicate = fixed;
        }
    } else if let Term::Iri(obj) = &q.object {
        let fixed = fix_namespace(obj);
        if &fixed != obj {
            report.namespace_fixes += 1;
        }
        if fixed.starts_with(SCHEMA_NS) {
            match vocab.canonical_type(&fixed) {
                Some(c) => {
                    if c != fixed {
                        report.casing_fixes += 1;
                    }
                    q.object = Term::Iri(c.to_string());
                }
                None => {
                    undefined = true;
                    q.object = Term::Iri(fixed);
                }
            }
        } else {
            q.object = Term::Iri(fixed);
        }
    }

    if undefined && policy == UndefinedPolicy::Drop {
        report.dropped_undefined += 1;
        return QuadOutcome {
            quad: None,
            undefined,
            report,
        };
    }
    report.quads_out += 1;
    if undefined {
        report.flagged_undefined += 1;
    }
    QuadOutcome {
        quad: Some(q),
        undefined,
        report,
    }
}

/// Apply namespace then casing fixes to every schema.org predicate and every
/// schema.org `rdf:type` object.
pub fn cleanse_quads(quads: Vec<Quad>, vocab: &Vocabulary, policy: UndefinedPolicy) -> Cleansed {
    let outcomes: Vec<QuadOutcome> = quads
        .into_par_iter()
        .map(|q| cleanse_one(q, vocab, policy))
        .collect();
    let mut out = Cleansed::default();
    for o in outcomes {
        out.report = std::mem::take(&mut out.report).merge(o.report);
        if let Some(q) = o.quad {
            out.quads.push(q);
            out.undefined.push(o.undefined);
        }
    }
    out
}

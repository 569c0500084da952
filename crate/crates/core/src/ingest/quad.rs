use std::fmt;

use serde::{Deserialize, Serialize};

/// An RDF term in subject or object position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Iri(String),
    /// Blank node label without the `_:` prefix.
    Blank(String),
    Literal {
        value: String,
        lang: Option<String>,
        datatype: Option<String>,
    },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Self {
        Term::Iri(s.into())
    }

    pub fn literal(s: impl Into<String>) -> Self {
        Term::Literal {
            value: s.into(),
            lang: None,
            datatype: None,
        }
    }

    pub fn lang_literal(s: impl Into<String>, lang: impl Into<String>) -> Self {
        Term::Literal {
            value: s.into(),
            lang: Some(lang.into()),
            datatype: None,
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            _ => None,
        }
    }

    pub fn literal_value(&self) -> Option<&str> {
        match self {
            Term::Literal { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Compact label used for node identity and JSON output: the IRI itself,
    /// `_:label` for blank nodes.
    pub fn label(&self) -> String {
        match self {
            Term::Iri(s) => s.clone(),
            Term::Blank(b) => format!("_:{b}"),
            Term::Literal { value, .. } => value.clone(),
        }
    }

    /// Inverse of [`Term::label`] for subject positions.
    pub fn from_subject_label(label: &str) -> Self {
        match label.strip_prefix("_:") {
            Some(b) => Term::Blank(b.to_string()),
            None => Term::Iri(label.to_string()),
        }
    }
}

pub(crate) fn escape_literal(value: &str, out: &mut String) {
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c => out.push(c),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(s) => write!(f, "<{s}>"),
            Term::Blank(b) => write!(f, "_:{b}"),
            Term::Literal {
                value,
                lang,
                datatype,
            } => {
                let mut s = String::with_capacity(value.len() + 2);
                s.push('"');
                escape_literal(value, &mut s);
                s.push('"');
                if let Some(lang) = lang {
                    s.push('@');
                    s.push_str(lang);
                } else if let Some(dt) = datatype {
                    s.push_str("^^<");
                    s.push_str(dt);
                    s.push('>');
                }
                f.write_str(&s)
            }
        }
    }
}

/// One extracted statement: subject, predicate, object and the URL of the
/// page it was extracted from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quad {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
    pub source_url: String,
}

impl Quad {
    pub fn new(
        subject: Term,
        predicate: impl Into<String>,
        object: Term,
        source_url: impl Into<String>,
    ) -> Self {
        Quad {
            subject,
            predicate: predicate.into(),
            object,
            source_url: source_url.into(),
        }
    }

    /// Serialise as a single N-Quads line (without the trailing newline).
    pub fn to_nquads(&self) -> String {
        format!(
            "{} <{}> {} <{}> .",
            self.subject, self.predicate, self.object, self.source_url
        )
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_nquads())
    }
}

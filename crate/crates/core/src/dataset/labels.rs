use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

use super::{EVENT_ROOT, GENRE_PREDICATE, MOVIE_ROOT, OTHER};
use crate::error::{Error, Result};
use crate::ingest::NodeRecord;
use crate::vocab::{local_name, Vocabulary};
use crate::SCHEMA_NS;

static BUNDLED_GENRES: &str = include_str!("../../data/imdb_genres.txt");

/// Outcome of labeling one event node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventLabel {
    /// One of the head subtypes (local name), or [`OTHER`].
    Class(String),
    /// Typed only as the generic `s:Event`: a prediction target.
    Generic,
    /// More than one unrelated subtype; excluded from training.
    MultiType,
    /// No event type at all.
    NotEvent,
}

/// The most specific event subtypes of a node: proper subtypes of `s:Event`
/// with ancestors of other listed types removed.
fn specific_event_types<'a>(node: &'a NodeRecord, vocab: &Vocabulary) -> (bool, Vec<&'a str>) {
    let mut is_event = false;
    let mut subs: Vec<&str> = Vec::new();
    for t in node.types() {
        if !vocab.is_subtype(t, EVENT_ROOT).unwrap_or(false) {
            continue;
        }
        is_event = true;
        if t != EVENT_ROOT && !subs.contains(&t) {
            subs.push(t);
        }
    }
    let specific: Vec<&str> = subs
        .iter()
        .copied()
        .filter(|t| {
            !subs
                .iter()
                .any(|o| o != t && vocab.is_subtype(o, t).unwrap_or(false))
        })
        .collect();
    (is_event, specific)
}

/// Label an event node against the head classes `top_k` (local names).
pub fn label_event_node(node: &NodeRecord, vocab: &Vocabulary, top_k: &[String]) -> EventLabel {
    let (is_event, specific) = specific_event_types(node, vocab);
    match specific.as_slice() {
        [] if is_event => EventLabel::Generic,
        [] => EventLabel::NotEvent,
        [t] => {
            let name = local_name(t);
            if top_k.iter().any(|k| k == name) {
                EventLabel::Class(name.to_string())
            } else {
                EventLabel::Class(OTHER.to_string())
            }
        }
        _ => EventLabel::MultiType,
    }
}

/// Frequency of each most-specific event subtype over uniquely typed nodes,
/// sorted by decreasing count then name.
pub fn event_class_frequencies<'a>(
    nodes: impl IntoIterator<Item = &'a NodeRecord>,
    vocab: &Vocabulary,
) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for n in nodes {
        let (_, specific) = specific_event_types(n, vocab);
        if let [t] = specific.as_slice() {
            *counts.entry(local_name(t).to_string()).or_default() += 1;
        }
    }
    let mut v: Vec<_> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

/// Genre names with their accepted spellings.
#[derive(Clone, Debug)]
pub struct GenreList {
    /// `(canonical name, lowercase spellings)`
    entries: Vec<(String, Vec<String>)>,
}

impl GenreList {
    /// The 22 IMDB genres.
    pub fn bundled() -> &'static GenreList {
        static LIST: OnceLock<GenreList> = OnceLock::new();
        LIST.get_or_init(|| GenreList::parse(BUNDLED_GENRES))
    }

    pub fn load(path: &Path) -> Result<GenreList> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(GenreList::parse(&text))
    }

    /// One genre per line; `|` separates alternative spellings; `#` starts a
    /// comment line.
    pub fn parse(text: &str) -> GenreList {
        let entries = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let mut parts = l.split('|').map(str::trim).filter(|s| !s.is_empty());
                let name = parts.next().unwrap_or_default().to_string();
                let mut spellings = vec![name.to_lowercase()];
                spellings.extend(parts.map(str::to_lowercase));
                (name, spellings)
            })
            .collect();
        GenreList { entries }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Genres contained (case-insensitively) in a literal.
    pub fn matches(&self, literal: &str) -> BTreeSet<String> {
        let lower = literal.to_lowercase();
        self.entries
            .iter()
            .filter(|(_, spellings)| spellings.iter().any(|s| lower.contains(s.as_str())))
            .map(|(n, _)| n.clone())
            .collect()
    }
}

/// `s:genre`, plain or in composite `<Type>/genre` form.
pub fn is_genre_predicate(p: &str) -> bool {
    p == GENRE_PREDICATE || (p.starts_with(SCHEMA_NS) && p.ends_with("/genre"))
}

/// Union of the genres found in all `s:genre` literals of a node.
pub fn label_movie_node(node: &NodeRecord, genres: &GenreList) -> BTreeSet<String> {
    node.statements
        .iter()
        .filter(|s| is_genre_predicate(&s.predicate))
        .filter_map(|s| s.object.literal_value())
        .flat_map(|lit| genres.matches(lit))
        .collect()
}

pub(crate) fn is_movie_with_genre(node: &NodeRecord, vocab: &Vocabulary) -> bool {
    node.types()
        .any(|t| vocab.is_subtype(t, MOVIE_ROOT).unwrap_or(false))
        && node.statements.iter().any(|s| is_genre_predicate(&s.predicate))
}

/// Genre frequencies over movie nodes, decreasing count then name.
pub fn genre_frequencies<'a>(
    nodes: impl IntoIterator<Item = &'a NodeRecord>,
    vocab: &Vocabulary,
    genres: &GenreList,
) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for n in nodes {
        if is_movie_with_genre(n, vocab) {
            for g in label_movie_node(n, genres) {
                *counts.entry(g).or_default() += 1;
            }
        }
    }
    let mut v: Vec<_> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Statement, Term};
    use crate::RDF_TYPE;

    fn typed(types: &[&str], extra: &[(&str, Term)]) -> NodeRecord {
        let mut statements: Vec<Statement> = types
            .iter()
            .map(|t| Statement {
                predicate: RDF_TYPE.into(),
                object: Term::iri(format!("http://schema.org/{t}")),
            })
            .collect();
        statements.extend(extra.iter().map(|(p, o)| Statement {
            predicate: p.to_string(),
            object: o.clone(),
        }));
        NodeRecord {
            subject: Term::Blank("n".into()),
            url: "http://a.com/".into(),
            pld: "a.com".into(),
            tld: ".com".into(),
            statements,
        }
    }

    fn top7() -> Vec<String> {
        [
            "PublicationEvent",
            "MusicEvent",
            "ScreeningEvent",
            "ComedyEvent",
            "TheaterEvent",
            "EducationEvent",
            "VisualArtsEvent",
        ]
        .map(String::from)
        .to_vec()
    }

    #[test]
    fn event_labels() {
        let v = Vocabulary::bundled();
        let k = top7();
        assert_eq!(
            label_event_node(&typed(&["BusinessEvent"], &[]), v, &k),
            EventLabel::Class(OTHER.into())
        );
        assert_eq!(label_event_node(&typed(&["Event"], &[]), v, &k), EventLabel::Generic);
        assert_eq!(
            label_event_node(&typed(&["Event", "MusicEvent"], &[]), v, &k),
            EventLabel::Class("MusicEvent".into())
        );
        assert_eq!(
            label_event_node(&typed(&["MusicEvent", "SportsEvent"], &[]), v, &k),
            EventLabel::MultiType
        );
        assert_eq!(label_event_node(&typed(&["Movie"], &[]), v, &k), EventLabel::NotEvent);
        // BroadcastEvent is below PublicationEvent; the most specific type wins
        assert_eq!(
            label_event_node(&typed(&["PublicationEvent", "BroadcastEvent"], &[]), v, &k),
            EventLabel::Class(OTHER.into())
        );
    }

    #[test]
    fn frequencies_are_sorted() {
        let v = Vocabulary::bundled();
        let nodes = vec![
            typed(&["MusicEvent"], &[]),
            typed(&["MusicEvent"], &[]),
            typed(&["ComedyEvent"], &[]),
            typed(&["BusinessEvent"], &[]),
            typed(&["Event"], &[]),
        ];
        let f = event_class_frequencies(&nodes, v);
        assert_eq!(
            f,
            vec![
                ("MusicEvent".into(), 2),
                ("BusinessEvent".into(), 1),
                ("ComedyEvent".into(), 1)
            ]
        );
    }

    #[test]
    fn genre_containment() {
        let g = GenreList::bundled();
        assert_eq!(g.len(), 22);
        let movie = |lit: &str| typed(&["Movie"], &[(GENRE_PREDICATE, Term::literal(lit))]);
        assert_eq!(label_movie_node(&movie("Drama"), g), BTreeSet::from(["Drama".into()]));
        assert_eq!(
            label_movie_node(&movie("Action/Adventure, Sci-Fi"), g),
            BTreeSet::from(["Action".into(), "Adventure".into(), "Sci-Fi".into()])
        );
        assert!(label_movie_node(&movie("Música"), g).is_empty());
        assert_eq!(
            label_movie_node(&movie("science fiction"), g),
            BTreeSet::from(["Sci-Fi".into()])
        );
        let two = typed(
            &["Movie"],
            &[
                (GENRE_PREDICATE, Term::literal("Drama")),
                ("http://schema.org/Movie/genre", Term::literal("romance")),
            ],
        );
        assert_eq!(
            label_movie_node(&two, g),
            BTreeSet::from(["Drama".into(), "Romance".into()])
        );
    }

    #[test]
    fn genre_matching_agrees_with_brute_force() {
        let g = GenreList::bundled();
        let names: Vec<&str> = g.names().collect();
        for lit in ["Action/Adventure, Sci-Fi", "War & Western", "Musical", "film-noir crime"] {
            let brute: BTreeSet<String> = names
                .iter()
                .filter(|n| lit.to_lowercase().contains(&n.to_lowercase()))
                .map(|n| n.to_string())
                .collect();
            assert!(brute.is_subset(&g.matches(lit)), "{lit}");
        }
    }
}

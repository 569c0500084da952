//! Seeded generator of synthetic markup corpora with known class labels.
//!
//! Every labeled node draws its statements from a mixture: with probability
//! `signal` a predicate comes from its class's own key distribution,
//! otherwise from a background distribution shared by all classes. plds
//! follow a Zipf law; with probability `signal * pld_correlation` a node is
//! placed on one of its class's home plds. Each pld also has a fixed
//! template key, a predicate style (plain or `Type/prop`) and, with
//! probability `site_quirk`, a site-specific key whose meaning differs
//! from site to site.

use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Zipf;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Quad, Term};
use crate::rng::{derive_seed, stage_rng};
use crate::{RDF_TYPE, SCHEMA_NS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    /// Class = event subtype.
    #[default]
    Events,
    /// Class = movie genre, stated through `s:genre`.
    Movies,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub label: String,
    /// schema.org types (local names) the class's nodes are typed with,
    /// chosen uniformly. Ignored for movies.
    #[serde(default)]
    pub types: Vec<String>,
    /// Class-discriminative properties with relative weights.
    pub keys: Vec<(String, f64)>,
    /// Probability a statement comes from `keys` rather than the background.
    pub signal: f64,
    /// Type of the companion node this class prefers on its pages.
    #[serde(default)]
    pub companion: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCorpusSpec {
    pub kind: CorpusKind,
    pub classes: Vec<ClassSpec>,
    pub background_keys: Vec<(String, f64)>,
    pub quirk_keys: Vec<String>,
    pub nodes_per_class: usize,
    /// Inclusive range of drawn statements per node.
    pub keys_per_node: (usize, usize),
    pub n_plds: usize,
    /// Zipf exponent of the pld distribution.
    pub skew: f64,
    pub pld_correlation: f64,
    pub site_quirk: f64,
    /// Probability a page also carries a companion node.
    pub companion_rate: f64,
    /// Unlabeled nodes (generic `s:Event`, or movies without genre) as a
    /// fraction of the labeled ones.
    pub unlabeled_fraction: f64,
    /// Probability a predicate IRI is corrupted (scheme, host or casing).
    pub noise: f64,
    pub seed: u64,
}

/// True class of one generated node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabel {
    pub subject: String,
    pub url: String,
    pub class: String,
    /// False for nodes generated without their class statement.
    pub labeled: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SyntheticCorpus {
    pub quads: Vec<Quad>,
    pub gold: Vec<GoldLabel>,
}

const TLDS: [(&str, &str); 5] = [(".com", "en"), (".org", "en"), (".de", "de"), (".co.uk", "en"), (".fr", "fr")];
const COMPANIONS: [&str; 3] = ["Place", "Organization", "Person"];

fn weighted(keys: &[(String, f64)]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(keys.iter().map(|k| k.1)).map_err(|e| Error::Invalid(format!("key weights: {e}")))
}

impl SyntheticCorpusSpec {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} {v} outside [0, 1]")))
            }
        };
        if self.classes.is_empty() || self.n_plds == 0 || self.nodes_per_class == 0 {
            return Err(Error::Invalid("synthetic corpus needs classes, plds and nodes".into()));
        }
        if self.keys_per_node.0 > self.keys_per_node.1 {
            return Err(Error::Invalid("keys_per_node range is empty".into()));
        }
        if self.skew < 0.0 {
            return Err(Error::Invalid(format!("negative skew {}", self.skew)));
        }
        for c in &self.classes {
            prob(&format!("signal of {}", c.label), c.signal)?;
            weighted(&c.keys)?;
            if self.kind == CorpusKind::Events && c.types.is_empty() {
                return Err(Error::Invalid(format!("class {} lists no types", c.label)));
            }
        }
        weighted(&self.background_keys)?;
        prob("pld_correlation", self.pld_correlation)?;
        prob("site_quirk", self.site_quirk)?;
        prob("companion_rate", self.companion_rate)?;
        prob("noise", self.noise)?;
        if self.unlabeled_fraction < 0.0 {
            return Err(Error::Invalid("negative unlabeled_fraction".into()));
        }
        Ok(())
    }

    pub fn class_labels(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.label.clone()).collect()
    }

    /// Eight event classes: seven head subtypes and an `Other` class drawn
    /// from four rarer subtypes. Classes overlap in their keys.
    pub fn events(seed: u64, nodes_per_class: usize, signal: f64) -> Self {
        let head = [
            "MusicEvent",
            "TheaterEvent",
            "ComedyEvent",
            "ScreeningEvent",
            "EducationEvent",
            "VisualArtsEvent",
            "PublicationEvent",
        ];
        let own = [
            "composer",
            "recordedIn",
            "director",
            "actor",
            "contributor",
            "translator",
            "workFeatured",
            "audience",
            "typicalAgeRange",
            "about",
            "funder",
            "sponsor",
            "maximumAttendeeCapacity",
            "inLanguage",
            "isAccessibleForFree",
            "attendee",
        ];
        let shared = [
            "performer",
            "duration",
            "doorTime",
            "eventStatus",
            "superEvent",
            "subEvent",
            "review",
            "aggregateRating",
        ];
        let k = head.len() + 1;
        let classes = (0..k)
            .map(|c| {
                let (label, types) = if c < head.len() {
                    (head[c].to_string(), vec![head[c].to_string()])
                } else {
                    (
                        crate::dataset::OTHER.to_string(),
                        ["BusinessEvent", "SportsEvent", "Festival", "FoodEvent"].map(String::from).to_vec(),
                    )
                };
                ClassSpec {
                    label,
                    types,
                    keys: vec![
                        (own[2 * c].into(), 1.0),
                        (own[2 * c + 1].into(), 1.0),
                        (shared[c].into(), 1.5),
                        (shared[(c + k - 1) % k].into(), 1.5),
                    ],
                    signal,
                    companion: Some(COMPANIONS[c % COMPANIONS.len()].into()),
                }
            })
            .collect();
        SyntheticCorpusSpec {
            kind: CorpusKind::Events,
            classes,
            background_keys: [
                ("startDate", 3.0),
                ("location", 3.0),
                ("url", 2.0),
                ("description", 2.0),
                ("image", 1.0),
                ("offers", 2.0),
                ("endDate", 1.0),
                ("organizer", 1.0),
            ]
            .map(|(k, w)| (k.to_string(), w))
            .to_vec(),
            quirk_keys: [
                "keywords",
                "alternateName",
                "identifier",
                "sameAs",
                "disambiguatingDescription",
                "additionalType",
                "mainEntityOfPage",
                "potentialAction",
            ]
            .map(String::from)
            .to_vec(),
            nodes_per_class,
            keys_per_node: (2, 5),
            n_plds: 200,
            skew: 1.0,
            pld_correlation: 0.5,
            site_quirk: 0.0,
            companion_rate: 0.5,
            unlabeled_fraction: 0.1,
            noise: 0.05,
            seed,
        }
    }

    /// Event corpus whose pld sizes are strongly skewed and whose sites
    /// carry site-specific quirks.
    pub fn skewed_events(seed: u64, nodes_per_class: usize) -> Self {
        SyntheticCorpusSpec {
            n_plds: 300,
            skew: 1.7,
            site_quirk: 0.8,
            ..Self::events(seed, nodes_per_class, 0.5)
        }
    }

    /// Movies over the given genres (each a class with its own keys).
    pub fn movies(seed: u64, genres: &[&str], nodes_per_class: usize, signal: f64) -> Self {
        let own = [
            "actor",
            "director",
            "musicBy",
            "productionCompany",
            "countryOfOrigin",
            "duration",
            "contentRating",
            "trailer",
            "award",
            "character",
            "aggregateRating",
            "review",
            "inLanguage",
            "dateCreated",
        ];
        let mut spec = Self::events(seed, nodes_per_class, signal);
        spec.kind = CorpusKind::Movies;
        spec.classes = genres
            .iter()
            .enumerate()
            .map(|(c, g)| ClassSpec {
                label: g.to_string(),
                types: vec![],
                keys: vec![
                    (own[(2 * c) % own.len()].into(), 1.0),
                    (own[(2 * c + 1) % own.len()].into(), 1.0),
                ],
                signal,
                companion: Some(COMPANIONS[c % COMPANIONS.len()].into()),
            })
            .collect();
        spec.background_keys = [("name", 1.0), ("url", 2.0), ("description", 2.0), ("image", 2.0), ("datePublished", 2.0)]
            .map(|(k, w)| (k.to_string(), w))
            .to_vec();
        spec
    }
}

fn pld_name(rank: usize) -> (String, &'static str) {
    let (tld, lang) = TLDS[rank % TLDS.len()];
    (format!("site{rank}{tld}"), lang)
}

fn corrupt<R: Rng>(iri: &str, rng: &mut R) -> String {
    let local = iri.strip_prefix(SCHEMA_NS).unwrap_or(iri);
    match rng.random_range(0..3) {
        0 => format!("https://schema.org/{local}"),
        1 => format!("http://www.schema.org/{local}"),
        _ => format!("{SCHEMA_NS}{}", local.to_ascii_lowercase()),
    }
}

struct Site {
    composite: bool,
    template: usize,
    quirk_offset: usize,
}

fn site(seed: u64, pld: &str, n_background: usize, n_quirks: usize) -> Site {
    let h = derive_seed(seed, "synthetic-site", pld);
    Site {
        composite: h & 1 == 1,
        template: (h >> 8) as usize % n_background,
        quirk_offset: (h >> 24) as usize % n_quirks.max(1),
    }
}

/// Generate the corpus described by `spec`.
pub fn generate(spec: &SyntheticCorpusSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let k = spec.classes.len();
    let zipf_all = Zipf::new(spec.n_plds as f64, spec.skew).map_err(|e| Error::Invalid(e.to_string()))?;
    let background = weighted(&spec.background_keys)?;
    let mut out = SyntheticCorpus::default();
    let mut page_no = 0usize;
    for (c, class) in spec.classes.iter().enumerate() {
        let home: Vec<usize> = (0..spec.n_plds).filter(|r| r % k == c).collect();
        let zipf_home = Zipf::new(home.len().max(1) as f64, spec.skew).map_err(|e| Error::Invalid(e.to_string()))?;
        let keys = weighted(&class.keys)?;
        let mut rng = stage_rng(spec.seed, "synthetic", &class.label);
        let n_unlabeled = (spec.nodes_per_class as f64 * spec.unlabeled_fraction).round() as usize;
        for i in 0..spec.nodes_per_class + n_unlabeled {
            let labeled = i < spec.nodes_per_class;
            let rank = if !home.is_empty() && rng.random_bool(class.signal * spec.pld_correlation) {
                home[zipf_home.sample(&mut rng) as usize - 1]
            } else {
                zipf_all.sample(&mut rng) as usize - 1
            };
            let (pld, lang) = pld_name(rank);
            let s = site(spec.seed, &pld, spec.background_keys.len(), spec.quirk_keys.len());
            page_no += 1;
            let url = format!("http://www.{pld}/p/{page_no}");
            let subject = Term::Blank(format!("n{page_no}"));
            let node_type = match spec.kind {
                CorpusKind::Events if labeled => class.types[rng.random_range(0..class.types.len())].clone(),
                CorpusKind::Events => "Event".to_string(),
                CorpusKind::Movies => "Movie".to_string(),
            };
            let mut push = |subject: &Term, pred: String, object: Term, rng: &mut crate::rng::StageRng| {
                let pred = if pred.starts_with(SCHEMA_NS) && spec.noise > 0.0 && rng.random_bool(spec.noise) {
                    corrupt(&pred, rng)
                } else {
                    pred
                };
                out.quads.push(Quad {
                    subject: subject.clone(),
                    predicate: pred,
                    object,
                    source_url: url.clone(),
                });
            };
            let prop = |p: &str, ty: &str| {
                if s.composite {
                    format!("{SCHEMA_NS}{ty}/{p}")
                } else {
                    format!("{SCHEMA_NS}{p}")
                }
            };
            push(&subject, RDF_TYPE.to_string(), Term::iri(format!("{SCHEMA_NS}{node_type}")), &mut rng);
            push(
                &subject,
                prop("name", &node_type),
                Term::lang_literal(format!("{} {page_no}", class.label.to_lowercase()), lang),
                &mut rng,
            );
            if spec.kind == CorpusKind::Movies && labeled {
                push(&subject, prop("genre", &node_type), Term::literal(class.label.clone()), &mut rng);
            }
            push(
                &subject,
                prop(&spec.background_keys[s.template].0, &node_type),
                Term::literal("t"),
                &mut rng,
            );
            let n = rng.random_range(spec.keys_per_node.0..=spec.keys_per_node.1);
            for j in 0..n {
                let key = if rng.random_bool(class.signal) {
                    &class.keys[keys.sample(&mut rng)].0
                } else {
                    &spec.background_keys[background.sample(&mut rng)].0
                };
                push(&subject, prop(key, &node_type), Term::literal(format!("v{j}")), &mut rng);
            }
            if !spec.quirk_keys.is_empty() && spec.site_quirk > 0.0 && rng.random_bool(spec.site_quirk) {
                let q = &spec.quirk_keys[(s.quirk_offset + c) % spec.quirk_keys.len()];
                push(&subject, prop(q, &node_type), Term::literal("q"), &mut rng);
            }
            if rng.random_bool(spec.companion_rate) {
                let ty = match &class.companion {
                    Some(t) if rng.random_bool(class.signal) => t.clone(),
                    _ => COMPANIONS[rng.random_range(0..COMPANIONS.len())].to_string(),
                };
                let comp = Term::Blank(format!("c{page_no}"));
                push(&comp, RDF_TYPE.to_string(), Term::iri(format!("{SCHEMA_NS}{ty}")), &mut rng);
                push(&comp, prop("name", &ty), Term::literal("companion"), &mut rng);
                push(&comp, prop("url", &ty), Term::iri(format!("http://www.{pld}/")), &mut rng);
            }
            out.gold.push(GoldLabel {
                subject: subject.label(),
                url: url.clone(),
                class: class.label.clone(),
                labeled,
            });
        }
    }
    Ok(out)
}

impl SyntheticCorpus {
    pub fn write_nquads<W: Write>(&self, mut w: W) -> Result<()> {
        for q in &self.quads {
            writeln!(w, "{}", q.to_nquads())?;
        }
        Ok(())
    }

    pub fn write_gold<W: Write>(&self, mut w: W) -> Result<()> {
        for g in &self.gold {
            serde_json::to_writer(&mut w, g)?;
            writeln!(w)?;
        }
        Ok(())
    }
}

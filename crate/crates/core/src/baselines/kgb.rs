//! Knowledge-graph baseline: link a node's `s:name` to an entity through a
//! Spotlight-compatible annotation service and accept the link when the
//! entity is confident enough and has a type compatible with the task.
//!
//! An accepted link says nothing about the subtype or genre itself. Under
//! [`Scoring::Generous`] it counts as a correct inference; under
//! [`Scoring::Strict`] it only counts when one of the entity's types names
//! the gold class.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Task, OTHER};
use crate::error::{Error, Result};
use crate::ingest::{NodeRecord, Term};
use crate::SCHEMA_NS;

/// Language codes with a dedicated annotation model; other languages use
/// English.
pub const SUPPORTED_LANGUAGES: [&str; 12] = ["da", "de", "en", "es", "fr", "hu", "it", "nl", "pt", "ru", "sv", "tr"];

pub const DEFAULT_ENDPOINT: &str = "https://api.dbpedia-spotlight.org/{lang}/annotate";
/// Environment variable overriding the endpoint template.
pub const ENDPOINT_ENV: &str = "MARKUP_INFER_LINKING_ENDPOINT";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkingConfig {
    /// URL template; `{lang}` is replaced by the model language.
    pub endpoint: String,
    pub threshold: f64,
    /// Accepted entity types per task kind, compared by local name.
    pub event_types: Vec<String>,
    pub movie_types: Vec<String>,
    pub timeout_secs: u64,
    pub retries: usize,
    pub max_in_flight: usize,
    /// When set, answers come from this fixture file instead of the network.
    pub fixtures: Option<PathBuf>,
}

impl Default for LinkingConfig {
    fn default() -> Self {
        LinkingConfig {
            endpoint: std::env::var(ENDPOINT_ENV).unwrap_or_else(|_| DEFAULT_ENDPOINT.to_string()),
            threshold: 0.5,
            event_types: vec!["Event".into()],
            movie_types: vec!["Movie".into(), "Film".into()],
            timeout_secs: 10,
            retries: 2,
            max_in_flight: 4,
            fixtures: None,
        }
    }
}

impl LinkingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Invalid(format!("linking threshold {} outside [0, 1]", self.threshold)));
        }
        Ok(())
    }

    pub fn accepted_types(&self, task: &Task) -> &[String] {
        match task {
            Task::Events => &self.event_types,
            Task::Genre(_) => &self.movie_types,
        }
    }

    /// Client for this configuration: fixtures when configured, else HTTP.
    pub fn client(&self) -> Result<Box<dyn LinkingClient>> {
        self.validate()?;
        Ok(match &self.fixtures {
            Some(p) => Box::new(FixtureClient::load(p)?),
            None => Box::new(HttpClient::new(&self.endpoint, self.threshold, Duration::from_secs(self.timeout_secs))?),
        })
    }
}

/// One candidate entity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub uri: String,
    pub types: Vec<String>,
    pub score: f64,
}

/// Source of candidate entities for a surface form.
pub trait LinkingClient: Send + Sync {
    fn candidates(&self, text: &str, lang: &str) -> Result<Vec<Candidate>>;
}

fn parse_score(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn parse_types(v: Option<&serde_json::Value>) -> Vec<String> {
    match v {
        Some(serde_json::Value::String(s)) => s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect(),
        Some(serde_json::Value::Array(a)) => a.iter().filter_map(|t| t.as_str().map(String::from)).collect(),
        _ => Vec::new(),
    }
}

/// Parse either a plain candidate list `[{uri, types, similarityScore}]` or
/// a Spotlight annotation object `{"Resources": [{"@URI", "@types",
/// "@similarityScore"}]}`.
pub fn parse_candidates(body: &str) -> Result<Vec<Candidate>> {
    let v: serde_json::Value = serde_json::from_str(body).map_err(|e| Error::Service(format!("bad response: {e}")))?;
    let items = match &v {
        serde_json::Value::Array(a) => a.clone(),
        serde_json::Value::Object(o) => match o.get("Resources") {
            Some(serde_json::Value::Array(a)) => a.clone(),
            Some(_) => return Err(Error::Service("Resources is not a list".into())),
            None => Vec::new(),
        },
        _ => return Err(Error::Service("response is neither a list nor an object".into())),
    };
    items
        .iter()
        .map(|it| {
            let field = |plain: &str, spot: &str| it.get(plain).or_else(|| it.get(spot));
            let uri = field("uri", "@URI")
                .and_then(|u| u.as_str())
                .ok_or_else(|| Error::Service("candidate without a URI".into()))?;
            let score = field("similarityScore", "@similarityScore")
                .and_then(parse_score)
                .ok_or_else(|| Error::Service(format!("candidate {uri} without a score")))?;
            Ok(Candidate {
                uri: uri.to_string(),
                types: parse_types(field("types", "@types")),
                score,
            })
        })
        .collect()
}

/// Blocking HTTP client for a Spotlight-compatible endpoint.
pub struct HttpClient {
    endpoint: String,
    confidence: f64,
    http: reqwest::blocking::Client,
}

impl HttpClient {
    pub fn new(endpoint: &str, confidence: f64, timeout: Duration) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| Error::Service(e.to_string()))?;
        Ok(HttpClient {
            endpoint: endpoint.to_string(),
            confidence,
            http,
        })
    }
}

impl LinkingClient for HttpClient {
    fn candidates(&self, text: &str, lang: &str) -> Result<Vec<Candidate>> {
        let url = self.endpoint.replace("{lang}", lang);
        let resp = self
            .http
            .get(&url)
            .header("Accept", "application/json")
            .query(&[("text", text), ("confidence", &self.confidence.to_string())])
            .send()
            .map_err(|e| Error::Service(format!("{url}: {e}")))?;
        let status = resp.status();
        let body = resp.text().map_err(|e| Error::Service(format!("{url}: {e}")))?;
        if !status.is_success() {
            return Err(Error::Service(format!("{url}: HTTP {status}")));
        }
        parse_candidates(&body)
    }
}

/// Offline client answering from a JSON object that maps query text to a
/// canned response body (either accepted response shape).
#[derive(Clone, Debug, Default)]
pub struct FixtureClient {
    responses: BTreeMap<String, Vec<Candidate>>,
}

impl FixtureClient {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, serde_json::Value> = serde_json::from_str(text)?;
        let responses = raw
            .into_iter()
            .map(|(k, v)| Ok((k, parse_candidates(&v.to_string())?)))
            .collect::<Result<_>>()?;
        Ok(FixtureClient { responses })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

impl LinkingClient for FixtureClient {
    fn candidates(&self, text: &str, _lang: &str) -> Result<Vec<Candidate>> {
        Ok(self.responses.get(text).cloned().unwrap_or_default())
    }
}

/// Outcome of linking one node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum KgbDecision {
    /// A confident candidate of an accepted type.
    Accepted { candidate: Candidate },
    /// No candidate passed the confidence and type filters.
    Rejected,
    /// The node has no `s:name` literal.
    NoName,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scoring {
    /// Every accepted link is taken to carry the gold label.
    #[default]
    Generous,
    /// An accepted link carries the gold label only when one of its types
    /// names it.
    Strict,
}

fn local(t: &str) -> &str {
    let t = t.rsplit(['/', '#']).next().unwrap_or(t);
    t.rsplit(':').next().unwrap_or(t)
}

impl KgbDecision {
    /// Label assigned to a node whose true class is `gold`.
    pub fn label(&self, gold: &str, scoring: Scoring) -> String {
        match self {
            KgbDecision::Accepted { candidate } => match scoring {
                Scoring::Generous => gold.to_string(),
                Scoring::Strict if candidate.types.iter().any(|t| local(t).eq_ignore_ascii_case(gold)) => gold.to_string(),
                Scoring::Strict => OTHER.to_string(),
            },
            _ => OTHER.to_string(),
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self, KgbDecision::Accepted { .. })
    }
}

fn is_name_predicate(p: &str) -> bool {
    p.strip_prefix(SCHEMA_NS)
        .is_some_and(|l| l == "name" || l.rsplit_once('/').is_some_and(|(_, prop)| prop == "name"))
}

/// First `s:name` literal with its model language.
pub fn name_and_language(node: &NodeRecord) -> Option<(String, String)> {
    node.statements.iter().filter(|s| is_name_predicate(&s.predicate)).find_map(|s| match &s.object {
        Term::Literal { value, lang, .. } => {
            let primary = lang
                .as_deref()
                .and_then(|l| l.split(['-', '_']).next())
                .map(str::to_ascii_lowercase);
            let lang = match primary {
                Some(l) if SUPPORTED_LANGUAGES.contains(&l.as_str()) => l,
                _ => "en".to_string(),
            };
            Some((value.clone(), lang))
        }
        _ => None,
    })
}

/// Link one node. Among candidates at or above the threshold with an
/// accepted type, the most confident one is kept (earliest on ties).
pub fn kgb_classify(node: &NodeRecord, client: &dyn LinkingClient, config: &LinkingConfig, task: &Task) -> Result<KgbDecision> {
    let Some((name, lang)) = name_and_language(node) else {
        return Ok(KgbDecision::NoName);
    };
    let accepted = config.accepted_types(task);
    let mut best: Option<Candidate> = None;
    for c in client.candidates(&name, &lang)? {
        let typed = c.types.iter().any(|t| accepted.iter().any(|a| local(t).eq_ignore_ascii_case(a)));
        if c.score >= config.threshold && typed && best.as_ref().is_none_or(|b| c.score > b.score) {
            best = Some(c);
        }
    }
    Ok(match best {
        Some(candidate) => KgbDecision::Accepted { candidate },
        None => KgbDecision::Rejected,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchOutcome {
    /// `None` for nodes skipped after exhausting retries.
    pub decisions: Vec<Option<KgbDecision>>,
    pub no_name: usize,
    pub skipped: usize,
}

/// Link many nodes with at most `max_in_flight` concurrent requests. Failed
/// requests are retried `retries` times, then the node is skipped.
pub fn classify_batch(nodes: &[&NodeRecord], client: &dyn LinkingClient, config: &LinkingConfig, task: &Task) -> Result<BatchOutcome> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.max_in_flight.max(1))
        .build()
        .map_err(|e| Error::Service(e.to_string()))?;
    let decisions: Vec<Option<KgbDecision>> = pool.install(|| {
        nodes
            .par_iter()
            .map(|n| {
                for attempt in 0..=config.retries {
                    match kgb_classify(n, client, config, task) {
                        Ok(d) => return Some(d),
                        Err(e) => log::warn!("linking {} (attempt {}): {e}", n.subject.label(), attempt + 1),
                    }
                }
                None
            })
            .collect()
    });
    let no_name = decisions.iter().filter(|d| matches!(d, Some(KgbDecision::NoName))).count();
    let skipped = decisions.iter().filter(|d| d.is_none()).count();
    Ok(BatchOutcome {
        decisions,
        no_name,
        skipped,
    })
}

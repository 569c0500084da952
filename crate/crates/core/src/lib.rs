//! Inference of missing categorical properties (event subtypes, movie
//! genres) for entity nodes extracted from embedded web markup.
//!
//! The crate is organised as a pipeline:
//!
//! * [`ingest`] streams N-Quads into [`ingest::Quad`]s, groups them into
//!   per-page [`ingest::NodeRecord`]s and profiles corpora.
//! * [`vocab`] models the schema.org type hierarchy and term casing.
//! * [`cleansing`] repairs namespace and capitalisation errors.
//! * [`dataset`] labels, balances, samples and splits instances.
//! * [`features`] builds pld/tld one-hot, node-vocab and page-vocab vectors.
//! * [`learn`] holds the classifiers, random search and the model file.
//! * [`baselines`] holds the Random, SD-Type and entity-linking baselines.
//! * [`eval`] computes macro metrics and paired t-tests.
//! * [`synthetic`] and [`pipeline`] drive desk-scale end-to-end runs.


pub mod baselines;
pub mod cleansing;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;


pub mod ingest;
pub mod learn;
pub mod pipeline;


pub mod rng;
pub mod synthetic;

pub mod vocab;

pub use error::{Error, Result};

/// `rdf:type`.
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
/// Canonical schema.org namespace.
pub const SCHEMA_NS: &str = "http://schema.org/";

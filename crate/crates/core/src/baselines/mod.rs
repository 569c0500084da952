//! Comparison systems: uniform random guessing, SD-Type over outgoing
//! predicates, and entity linking against a knowledge graph (KG-B).

pub mod kgb;
pub mod random;
pub mod sdtype;

pub use kgb::{
    kgb_classify, classify_batch, BatchOutcome, Candidate, FixtureClient, HttpClient, KgbDecision,
    LinkingClient, LinkingConfig, Scoring, SUPPORTED_LANGUAGES,
};
pub use random::{predict_random, RandomBaseline};
pub use sdtype::{KeyStatistics, SdTypeStatistics};

//! Streaming N-Quads ingestion, node assembly and corpus profiling.

mod domain;
mod node;
mod parser;
mod profile;
mod quad;

pub use domain::{extract_pld_tld, DomainParts, SuffixList};
pub use node::{
    assemble_nodes, read_nodes_jsonl, write_nodes_jsonl, NodeId, NodeRecord, Statement,
};
pub use parser::{open_corpus, parse_nquads, ErrorPolicy, ParseReport, QuadReader, SkippedLine};
pub use profile::{profile_corpus, CorpusStats, Summary};
pub use quad::{Quad, Term};

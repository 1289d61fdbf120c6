//! Corpus generation, named check suites, DOT export and the JSON documents
//! read by the command line.

mod corpus;
mod doc;
mod dot;
mod suite;

pub use corpus::{enumerate_semilattices, Corpus, CorpusMember, CorpusMemberRecord, CorpusRecord, CORPUS_CAP};
pub use doc::{Document, MorphismDocument};
pub use dot::{dot_diagram, dot_morphism, dot_semilattice};
pub use suite::{
    check_trimmed, check_universality, cocones, curated_size_six, diagram_family, embeddings, run_suite, SuiteConfig,
    SuiteReport, Violation, SUITES,
};

//! Obstructions to simultaneous lattice embeddings of direct systems into
//! Boolean diagrams.

mod obstruct;
mod search;
mod system;

pub use obstruct::{
    boundary, build_counterexample, first_necess_failure, necess_check, Constraint, Counterexample, NecessFailure,
    NecessResult, NecessWitness, SquareElements, SQUARE_A, SQUARE_A1, SQUARE_A2, SQUARE_S,
};
pub use search::{
    birkhoff_embedding, mu_family, search_simultaneous, search_simultaneous_with, ExhaustReason, MuFamily,
    SearchOptions, SearchOutcome, SimultEmbedding, MU_FAMILY_ATOM_CAP, SEARCH_ATOM_CAP,
};
pub use system::{DirectSystem, DirectSystemRecord};

use thiserror::Error;

/// Errors raised by the workbench.
///
/// Variants carrying indices name the witnesses that violate the stated property.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("join table is not square: row {row} has length {len}, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("index {index} out of range for a structure of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("empty carrier: a semilattice needs at least one element")]
    Empty,
    #[error("join is not idempotent: {x} v {x} != {x}")]
    NotIdempotent { x: usize },
    #[error("join is not commutative at ({x}, {y})")]
    NotCommutative { x: usize, y: usize },
    #[error("join is not associative at ({x}, {y}, {z})")]
    NotAssociative { x: usize, y: usize, z: usize },
    #[error("declared zero is not neutral: zero v {x} != {x}")]
    ZeroNotNeutral { x: usize },
    #[error("relation is not a partial order: {0}")]
    NotAPartialOrder(String),
    #[error("no least upper bound for ({x}, {y})")]
    NoJoin { x: usize, y: usize },
    #[error("map does not preserve joins at ({x}, {y})")]
    NotJoinPreserving { x: usize, y: usize },
    #[error("map does not preserve zero")]
    NotZeroPreserving,
    #[error("map does not preserve meets at ({x}, {y})")]
    NotMeetPreserving { x: usize, y: usize },
    #[error("map length {len} does not match source size {size}")]
    MapLength { len: usize, size: usize },
    #[error("morphisms are not composable")]
    NotComposable,
    #[error("morphism is not an embedding")]
    NotEmbedding,
    #[error("morphism is not an isomorphism")]
    NotIso,
    #[error("morphism is not surjective")]
    NotSurjective,
    #[error("morphism is not a lattice homomorphism")]
    NotLatticeHom,
    #[error("semilattice is not distributive (witness c={c} <= a={a} v b={b})")]
    NotDistributive { a: usize, b: usize, c: usize },
    #[error("partition is not a join congruence: {x}~{y} but not {x}v{z} ~ {y}v{z}")]
    NotACongruence { x: usize, y: usize, z: usize },
    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    SizeCapExceeded { what: String, needed: u128, cap: u128 },
    #[error("diagram is not functorial: {0}")]
    NotFunctorial(String),
    #[error("cocone does not commute with the arrow {from} -> {to}")]
    NotACocone { from: usize, to: usize },
    #[error("inconsistent factorization: {0}")]
    Inconsistent(String),
    #[error("missing dependency: {0}")]
    MissingDependency(String),
    #[error("element {0} is not join-irreducible")]
    NotJoinIrreducible(usize),
    #[error("work bound exceeded after {0} node expansions")]
    BoundTooLarge(u64),
    #[error("ill-formed construction: {0}")]
    IllFormed(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("serialization: {0}")]
    Serde(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

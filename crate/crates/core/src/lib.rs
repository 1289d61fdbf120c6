//! Exact computations on finite ⟨∨,0⟩-semilattices: the canonical Boolean
//! cover of finite distributive semilattices, the Boolean shelter, colimits,
//! the two-congruence extension GS(K), and obstructions to simultaneous lattice
//! embeddings.

pub mod colimit;
pub mod cover;
pub mod error;
pub mod gs;
pub mod lattice;
pub mod shelter;
pub mod simult;

pub use error::{Error, Result};
pub mod workbench;

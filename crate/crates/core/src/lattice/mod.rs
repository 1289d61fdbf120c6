//! Finite ⟨∨,0⟩-semilattices, their morphisms, posets, irreducibles,
//! congruences and canonical forms.

mod canon;
mod morphism;
mod ops;
mod poset;
mod semilattice;

pub use canon::{
    automorphisms, canonical_form, canonical_form_capped, canonical_key, is_isomorphic, isomorphisms,
    DEFAULT_CANON_CAP,
};
pub use morphism::{check_morphism, Morphism, MorphismFlags, MorphismRecord};
pub use ops::{
    classify, distributivity_witness, generated_subsemilattice, homomorphisms, irreducibles, is_atomistic, is_boolean,
    is_distributive, is_lattice_simple, join_closure, join_congruence_generated, join_irreducibles,
    lattice_congruence_generated, meet_irreducibles, require_distributive, subsemilattice, Classification,
    Partition,
};
pub use poset::{ideal_lattice, principal_ideal_index, Poset, PosetRecord};
pub use semilattice::{Semilattice, SemilatticeRecord};

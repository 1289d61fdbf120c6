use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Semilattice;
use crate::error::{Error, Result};

/// Properties of a ⟨∨,0⟩-homomorphism, computed once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismFlags {
    pub preserves_join: bool,
    pub preserves_zero: bool,
    pub preserves_unit: bool,
    pub injective: bool,
    pub surjective: bool,
    pub is_embedding: bool,
    pub is_lattice_hom: bool,
}

/// A ⟨∨,0⟩-homomorphism between finite semilattices.
///
/// Construction rejects maps that fail to preserve joins or zero, so every
/// `Morphism` is a homomorphism; the remaining flags classify it.
#[derive(Clone)]
pub struct Morphism {
    src: Arc<Semilattice>,
    dst: Arc<Semilattice>,
    map: Vec<usize>,
    flags: MorphismFlags,
}

/// JSON shape of a morphism; `src` and `dst` name semilattices in an enclosing document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismRecord {
    pub src: String,
    pub dst: String,
    pub map: Vec<usize>,
}

impl Morphism {
    /// Checks a raw element map and computes its flags.
    pub fn new(src: Arc<Semilattice>, dst: Arc<Semilattice>, map: Vec<usize>) -> Result<Self> {
        if map.len() != src.size() {
            return Err(Error::MapLength { len: map.len(), size: src.size() });
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= dst.size()) {
            return Err(Error::IndexOutOfRange { index: bad, size: dst.size() });
        }
        if map[src.zero()] != dst.zero() {
            return Err(Error::NotZeroPreserving);
        }
        for x in src.elements() {
            for y in (x + 1)..src.size() {
                if map[src.join(x, y)] != dst.join(map[x], map[y]) {
                    return Err(Error::NotJoinPreserving { x, y });
                }
            }
        }
        Ok(Self::trusted(src, dst, map))
    }

    /// Builds a morphism whose homomorphism property the caller has established.
    pub(crate) fn trusted(src: Arc<Semilattice>, dst: Arc<Semilattice>, map: Vec<usize>) -> Self {
        let flags = compute_flags(&src, &dst, &map);
        Morphism { src, dst, map, flags }
    }

    pub fn identity(s: Arc<Semilattice>) -> Self {
        let map = s.elements().collect();
        Self::trusted(s.clone(), s, map)
    }

    pub fn src(&self) -> &Arc<Semilattice> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<Semilattice> {
        &self.dst
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn flags(&self) -> MorphismFlags {
        self.flags
    }

    pub fn is_embedding(&self) -> bool {
        self.flags.is_embedding
    }

    pub fn is_iso(&self) -> bool {
        self.flags.injective && self.flags.surjective
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        if self.dst.as_ref() != other.src.as_ref() {
            return Err(Error::NotComposable);
        }
        let map = self.map.iter().map(|&x| other.map[x]).collect();
        Ok(Self::trusted(self.src.clone(), other.dst.clone(), map))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        other.then(self)
    }

    pub fn inverse(&self) -> Result<Morphism> {
        if !self.is_iso() {
            return Err(Error::NotIso);
        }
        let mut inv = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Ok(Self::trusted(self.dst.clone(), self.src.clone(), inv))
    }

    /// Image of the map as a sorted element list.
    pub fn image(&self) -> Vec<usize> {
        let mut im = self.map.clone();
        im.sort_unstable();
        im.dedup();
        im
    }

    pub fn same_map(&self, other: &Morphism) -> bool {
        self.map == other.map && self.src == other.src && self.dst == other.dst
    }
}

fn compute_flags(src: &Semilattice, dst: &Semilattice, map: &[usize]) -> MorphismFlags {
    let mut seen = vec![false; dst.size()];
    let mut injective = true;
    for &y in map {
        if seen[y] {
            injective = false;
        }
        seen[y] = true;
    }
    let surjective = seen.iter().all(|&b| b);
    let preserves_unit = map[src.top()] == dst.top();
    let mut is_lattice_hom = true;
    'outer: for x in src.elements() {
        for y in (x + 1)..src.size() {
            if map[src.meet(x, y)] != dst.meet(map[x], map[y]) {
                is_lattice_hom = false;
                break 'outer;
            }
        }
    }
    MorphismFlags {
        preserves_join: true,
        preserves_zero: true,
        preserves_unit,
        injective,
        surjective,
        is_embedding: injective,
        is_lattice_hom,
    }
}

/// Checks a raw map against `src` and `dst` and returns the classified morphism.
pub fn check_morphism(map: Vec<usize>, src: Arc<Semilattice>, dst: Arc<Semilattice>) -> Result<Morphism> {
    Morphism::new(src, dst, map)
}

impl PartialEq for Morphism {
    fn eq(&self, other: &Self) -> bool {
        self.same_map(other)
    }
}

impl Eq for Morphism {}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism({} -> {}, {:?})", self.src.size(), self.dst.size(), self.map)
    }
}

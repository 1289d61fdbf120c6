//! The canonical Boolean cover `⟨Φ, ε, μ⟩` of finite distributive
//! semilattices.
//!
//! `Φ_*(A)` is the colimit of the diagram `ρ_A`, computed as a lattice of
//! compatible families, and `Φ(A) = 𝔓(M(Φ_*(A)))` is kept implicit: its
//! elements are bitsets over the meet-irreducibles of `Φ_*(A)` in
//! enumeration order, and morphisms out of it are given by atom images.
//! Entries are computed for canonical forms only; other presentations are
//! transported along the canonical isomorphism.

mod functor;
mod report;
mod store;
mod subobjects;

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Morphism, Semilattice, SemilatticeRecord};
use crate::shelter::SHELTER_TABLE_CAP;

pub use functor::{phi_morphism, PhiIso};
pub use report::{
    retract_system, size_bound_report, trim_entry, trim_zero, trimmed_morphism, RetractedSystem, SizeBoundLine,
    SizeBoundReport, TrimReport, Trimmed,
};
pub use store::{build_rho, CoverStore, Rho, RhoArrow, RhoCarrier, RhoMap, RhoVertex, CACHE_DIR_ENV};
pub use subobjects::{subobject_poset, SubobjectPoset, SUBOBJECT_HOST_CAP};

/// Largest `|Φ_*(A)|` kept as an explicit join table in a [`CoverEntry`].
pub const PHI_STAR_TABLE_CAP: usize = 256;

/// A ⟨∨,0⟩-homomorphism between powersets, given by the images of the atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolMap {
    pub src_atoms: usize,
    pub dst_atoms: usize,
    pub images: Vec<FixedBitSet>,
}

impl BoolMap {
    pub fn identity(k: usize) -> Self {
        Self::from_perm(&(0..k).collect::<Vec<_>>())
    }

    pub fn to_record(&self) -> BoolMapRecord {
        BoolMapRecord { src_atoms: self.src_atoms, images: self.images.iter().map(|b| b.ones().collect()).collect() }
    }

    /// The atom permutation `t ↦ perm[t]`.
    pub fn from_perm(perm: &[usize]) -> Self {
        let k = perm.len();
        BoolMap { src_atoms: k, dst_atoms: k, images: perm.iter().map(|&p| singleton(k, p)).collect() }
    }

    pub fn apply(&self, x: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.dst_atoms);
        for t in x.ones() {
            out.union_with(&self.images[t]);
        }
        out
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &BoolMap) -> Result<BoolMap> {
        if self.dst_atoms != other.src_atoms {
            return Err(Error::NotComposable);
        }
        Ok(BoolMap {
            src_atoms: self.src_atoms,
            dst_atoms: other.dst_atoms,
            images: self.images.iter().map(|im| other.apply(im)).collect(),
        })
    }

    /// Injective iff every atom image has a point no other atom image covers.
    pub fn is_embedding(&self) -> bool {
        let mut once = FixedBitSet::with_capacity(self.dst_atoms);
        let mut twice = FixedBitSet::with_capacity(self.dst_atoms);
        for im in &self.images {
            let mut both = once.clone();
            both.intersect_with(im);
            twice.union_with(&both);
            once.union_with(im);
        }
        self.images.iter().all(|im| im.difference(&twice).next().is_some())
    }

    pub fn preserves_unit(&self) -> bool {
        let mut all = FixedBitSet::with_capacity(self.dst_atoms);
        for im in &self.images {
            all.union_with(im);
        }
        all.count_ones(..) == self.dst_atoms
    }

    /// As a table morphism between materialized powersets.
    pub fn to_morphism(&self) -> Result<Morphism> {
        let (src, dst) = (boolean_table(self.src_atoms)?, boolean_table(self.dst_atoms)?);
        let map = src.elements().map(|x| to_mask(&self.apply(&from_mask(self.src_atoms, x)))).collect();
        Ok(Morphism::trusted(src, dst, map))
    }
}

pub(crate) fn singleton(k: usize, t: usize) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(k);
    b.insert(t);
    b
}

pub(crate) fn full(k: usize) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(k);
    b.insert_range(..);
    b
}

pub(crate) fn from_mask(k: usize, mask: usize) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(k);
    for t in 0..k {
        if mask >> t & 1 == 1 {
            b.insert(t);
        }
    }
    b
}

pub(crate) fn to_mask(b: &FixedBitSet) -> usize {
    b.ones().fold(0, |m, t| m | 1 << t)
}

pub(crate) fn from_words(k: usize, words: &[u64]) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(k);
    crate::colimit::engine::for_each_bit(words, |t| b.insert(t));
    b
}

pub(crate) fn to_words(b: &FixedBitSet) -> Vec<u64> {
    let mut w = vec![0u64; crate::colimit::engine::words_for(b.len())];
    for t in b.ones() {
        w[t / 64] |= 1 << (t % 64);
    }
    w
}

/// `𝔓(k)` as a table, element `i` being the subset with bitmask `i`.
pub fn boolean_table(k: usize) -> Result<Arc<Semilattice>> {
    if k > SHELTER_TABLE_CAP {
        return Err(Error::SizeCapExceeded {
            what: "Boolean table".into(),
            needed: k as u128,
            cap: SHELTER_TABLE_CAP as u128,
        });
    }
    Ok(Arc::new(Semilattice::boolean(k)))
}

/// Explicit `Φ_*(A)` for small entries. Elements are in enumeration order.
#[derive(Clone, Debug)]
pub struct PhiStar {
    pub table: Arc<Semilattice>,
    /// `ε^A`
    pub eps_upper: Morphism,
    /// `μ^A`
    pub mu_upper: Morphism,
    /// `Φ_*(incl_X)` on the atoms of `Φ(X)`, per proper subobject
    pub sub_legs: Vec<Vec<usize>>,
    /// `η(s)` for every element `s`; the atoms are `M(Φ_*(A))`
    pub eta: Vec<FixedBitSet>,
}

/// `⟨Φ(A), ε_A, μ_A⟩` and the data needed to act on morphisms, for a canonical `A`.
#[derive(Clone, Debug)]
pub struct CoverEntry {
    pub key: String,
    pub object: Arc<Semilattice>,
    /// all subobjects, the full one last
    pub subobjects: Vec<Vec<usize>>,
    pub length: usize,
    /// per proper subobject: canonical relabeling, by position in the subobject
    pub sub_isos: Vec<Vec<usize>>,
    /// per proper subobject: key of its canonical form
    pub sub_keys: Vec<String>,
    pub phi_star_size: usize,
    /// distinct nonzero generators of `Φ_*(A)`
    pub generator_count: usize,
    /// number of atoms of `Φ(A)`
    pub atoms: usize,
    /// `ε_A(a)` for every `a`
    pub eps: Vec<FixedBitSet>,
    /// `μ_A` on atoms
    pub mu: Vec<usize>,
    /// `Φ(incl_X): Φ(X) → Φ(A)` per proper subobject
    pub sub_legs: Vec<BoolMap>,
    pub star: Option<PhiStar>,
}

impl CoverEntry {
    pub fn size(&self) -> usize {
        self.object.size()
    }

    /// `μ_A` on an arbitrary element of `Φ(A)`.
    pub fn mu_of(&self, x: &FixedBitSet) -> usize {
        self.object.join_all(x.ones().map(|t| self.mu[t]))
    }

    pub fn eps_map(&self) -> BoolEps {
        BoolEps { atoms: self.atoms, images: self.eps.clone() }
    }

    /// `Φ(A)` as a table, when small enough.
    pub fn phi_table(&self) -> Result<Arc<Semilattice>> {
        boolean_table(self.atoms)
    }

    /// `ε_A` and `μ_A` as table morphisms, when `Φ(A)` is small enough.
    pub fn eps_mu_morphisms(&self) -> Result<(Morphism, Morphism)> {
        let phi = self.phi_table()?;
        let eps = Morphism::trusted(self.object.clone(), phi.clone(), self.eps.iter().map(to_mask).collect());
        let mu = Morphism::trusted(
            phi.clone(),
            self.object.clone(),
            phi.elements().map(|x| self.mu_of(&from_mask(self.atoms, x))).collect(),
        );
        Ok((eps, mu))
    }

    pub fn to_record(&self) -> CoverEntryRecord {
        let ones = |b: &FixedBitSet| b.ones().collect::<Vec<_>>();
        CoverEntryRecord {
            key: self.key.clone(),
            object: self.object.to_record(),
            subobjects: self.subobjects.clone(),
            length: self.length,
            sub_isos: self.sub_isos.clone(),
            sub_keys: self.sub_keys.clone(),
            phi_star_size: self.phi_star_size,
            generator_count: self.generator_count,
            atoms: self.atoms,
            eps: self.eps.iter().map(ones).collect(),
            mu: self.mu.clone(),
            sub_legs: self
                .sub_legs
                .iter()
                .map(BoolMap::to_record)
                .collect(),
        }
    }

    /// Rebuilds an entry from its record; the explicit `Φ_*(A)` is not stored.
    pub fn from_record(r: &CoverEntryRecord) -> Result<Self> {
        let object = Arc::new(Semilattice::from_record(&r.object)?);
        let set = |k: usize, xs: &[usize]| -> Result<FixedBitSet> {
            let mut b = FixedBitSet::with_capacity(k);
            for &x in xs {
                if x >= k {
                    return Err(Error::IndexOutOfRange { index: x, size: k });
                }
                b.insert(x);
            }
            Ok(b)
        };
        let eps = r.eps.iter().map(|xs| set(r.atoms, xs)).collect::<Result<Vec<_>>>()?;
        let sub_legs = r
            .sub_legs
            .iter()
            .map(|l| {
                Ok(BoolMap {
                    src_atoms: l.src_atoms,
                    dst_atoms: r.atoms,
                    images: l.images.iter().map(|xs| set(r.atoms, xs)).collect::<Result<Vec<_>>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CoverEntry {
            key: r.key.clone(),
            object,
            subobjects: r.subobjects.clone(),
            length: r.length,
            sub_isos: r.sub_isos.clone(),
            sub_keys: r.sub_keys.clone(),
            phi_star_size: r.phi_star_size,
            generator_count: r.generator_count,
            atoms: r.atoms,
            eps,
            mu: r.mu.clone(),
            sub_legs,
            star: None,
        })
    }
}

/// `ε` as a map into a powerset, given elementwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolEps {
    pub atoms: usize,
    pub images: Vec<FixedBitSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoolMapRecord {
    pub src_atoms: usize,
    pub images: Vec<Vec<usize>>,
}

/// JSON shape of a [`CoverEntry`]; sets are listed by their atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverEntryRecord {
    pub key: String,
    pub object: SemilatticeRecord,
    pub subobjects: Vec<Vec<usize>>,
    pub length: usize,
    pub sub_isos: Vec<Vec<usize>>,
    pub sub_keys: Vec<String>,
    pub phi_star_size: usize,
    pub generator_count: usize,
    pub atoms: usize,
    pub eps: Vec<Vec<usize>>,
    pub mu: Vec<usize>,
    pub sub_legs: Vec<BoolMapRecord>,
}

/// `Φ` of an arbitrary presentation `X`, through the canonical isomorphism
/// `r: X → C` onto the stored entry: `ε_X = ε_C ∘ r`, `μ_X = r⁻¹ ∘ μ_C`.
#[derive(Clone, Debug)]
pub struct PhiObject {
    pub entry: Arc<CoverEntry>,
    pub iso: Morphism,
    inverse: Vec<usize>,
}

impl PhiObject {
    pub(crate) fn new(entry: Arc<CoverEntry>, iso: Morphism) -> Self {
        let mut inverse = vec![0; iso.map().len()];
        for (x, &c) in iso.map().iter().enumerate() {
            inverse[c] = x;
        }
        PhiObject { entry, iso, inverse }
    }

    pub fn object(&self) -> &Arc<Semilattice> {
        self.iso.src()
    }

    pub fn atoms(&self) -> usize {
        self.entry.atoms
    }

    pub fn eps(&self, x: usize) -> &FixedBitSet {
        &self.entry.eps[self.iso.apply(x)]
    }

    pub fn mu_atom(&self, t: usize) -> usize {
        self.inverse[self.entry.mu[t]]
    }

    pub fn mu(&self, x: &FixedBitSet) -> usize {
        self.object().join_all(x.ones().map(|t| self.mu_atom(t)))
    }

    pub fn eps_map(&self) -> BoolEps {
        BoolEps { atoms: self.atoms(), images: self.object().elements().map(|x| self.eps(x).clone()).collect() }
    }
}

/// `⟨Φ_*(A), ε^A, sub_legs, μ^A⟩` for the presentation `a`: `ε^A` and `μ^A`
/// are transported through the canonical isomorphism, the legs refer to the
/// subobjects of the canonical form.
pub fn phi_star(a: &Arc<Semilattice>, store: &CoverStore) -> Result<PhiStar> {
    let p = store.phi_object(a)?;
    let star = p.entry.star.as_ref().ok_or_else(|| Error::SizeCapExceeded {
        what: "explicit Φ_* table".into(),
        needed: p.entry.phi_star_size as u128,
        cap: PHI_STAR_TABLE_CAP as u128,
    })?;
    let inv = p.iso.inverse()?;
    Ok(PhiStar {
        table: star.table.clone(),
        eps_upper: p.iso.then(&star.eps_upper)?,
        mu_upper: star.mu_upper.then(&inv)?,
        sub_legs: star.sub_legs.clone(),
        eta: star.eta.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simult::DirectSystem;
    use crate::colimit::colimit_by_congruence;
    use crate::lattice::{automorphisms, is_isomorphic};

    fn arc(s: Semilattice) -> Arc<Semilattice> {
        Arc::new(s)
    }

    #[test]
    fn one_and_two_are_their_own_covers() {
        let store = CoverStore::new();
        let one = store.phi_object(&arc(Semilattice::chain(1))).unwrap();
        assert_eq!(one.atoms(), 0);
        let two = store.phi_object(&arc(Semilattice::chain(2))).unwrap();
        assert_eq!(two.atoms(), 1);
        assert_eq!(two.eps(1).count_ones(..), 1);
        assert_eq!(two.mu_atom(0), 1);
    }

    #[test]
    fn chain_three() {
        let store = CoverStore::new();
        let c3 = arc(Semilattice::chain(3));
        let p = store.phi_object(&c3).unwrap();
        assert_eq!(p.atoms(), 2);
        assert_eq!(p.entry.phi_star_size, 3);
        assert_eq!(p.eps(0).count_ones(..), 0);
        assert_eq!(p.eps(1).count_ones(..), 1);
        assert_eq!(*p.eps(2), full(2));
        let t = p.eps(1).ones().next().unwrap();
        assert_eq!(p.mu_atom(t), 1);
        assert_eq!(p.mu_atom(1 - t), 2);
        // μ({other}) = 1 although {other} is not in the image of ε
        assert_eq!(p.mu(&singleton(2, 1 - t)), 2);
    }

    #[test]
    fn rho_of_chain_three_has_colimit_phi_star() {
        let store = CoverStore::new();
        let c3 = arc(Semilattice::chain(3));
        let rho = build_rho(&c3, &store).unwrap();
        // four subobjects at level 0, three proper ones at level 1
        assert_eq!(rho.vertices.len(), 7);
        let d = rho.to_diagram().unwrap();
        let oracle = colimit_by_congruence(&d).unwrap();
        assert!(is_isomorphic(&oracle.apex, &Semilattice::chain(3)));
    }

    #[test]
    fn embeddings_of_two_into_chain_three() {
        let store = CoverStore::new();
        let two = arc(Semilattice::chain(2));
        let c3 = arc(Semilattice::chain(3));
        let p = store.phi_object(&c3).unwrap();
        let to_top = Morphism::new(two.clone(), c3.clone(), vec![0, 2]).unwrap();
        let phi = store.phi_morphism(&to_top).unwrap();
        assert_eq!(phi.images[0], full(2));
        let to_mid = Morphism::new(two, c3, vec![0, 1]).unwrap();
        let phi = store.phi_morphism(&to_mid).unwrap();
        assert_eq!(phi.images[0], *p.eps(1));
        assert!(!phi.preserves_unit());
    }

    #[test]
    fn square_swap_permutes_atoms() {
        let store = CoverStore::new();
        let sq = arc(Semilattice::boolean(2));
        let auts = automorphisms(&sq);
        assert_eq!(auts.len(), 2);
        for g in &auts {
            let iso = store.phi_iso(g).unwrap();
            let mut sorted = iso.atom_perm.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..iso.atom_perm.len()).collect::<Vec<_>>());
            if !g.map().iter().enumerate().all(|(i, &x)| i == x) {
                assert!(iso.atom_perm.iter().enumerate().any(|(i, &x)| i != x));
            }
            assert!(iso.star.is_some());
        }
    }

    #[test]
    fn transport_agrees_with_direct_computation() {
        // a relabeled chain-4 computed through the canonical form versus its own
        // ρ colimit
        let store = CoverStore::new();
        let c4 = Semilattice::chain(4);
        let relabeled = arc(c4.permuted(&[0, 2, 3, 1]));
        let p = store.phi_object(&relabeled).unwrap();
        let rho = build_rho(&relabeled, &store).unwrap();
        let d = rho.to_diagram().unwrap();
        let col = crate::colimit::colimit(&d).unwrap();
        assert_eq!(col.apex.size(), p.entry.phi_star_size);
        for x in relabeled.elements() {
            assert_eq!(p.mu(p.eps(x)), x);
        }
    }

    #[test]
    fn phi_is_functorial_on_a_chain_of_embeddings() {
        let store = CoverStore::new();
        let (c2, c3, c4) = (arc(Semilattice::chain(2)), arc(Semilattice::chain(3)), arc(Semilattice::chain(4)));
        let f = Morphism::new(c2.clone(), c3.clone(), vec![0, 2]).unwrap();
        let g = Morphism::new(c3, c4.clone(), vec![0, 1, 3]).unwrap();
        let gf = f.then(&g).unwrap();
        let lhs = store.phi_morphism(&f).unwrap().then(&store.phi_morphism(&g).unwrap()).unwrap();
        assert_eq!(lhs, store.phi_morphism(&gf).unwrap());
    }

    #[test]
    fn cache_roundtrip() {
        let dir = std::env::temp_dir().join(format!("boolcover-cache-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let sq = arc(Semilattice::boolean(2));
        let first = CoverStore::with_cache_dir(Some(&dir));
        let a = first.phi_object(&sq).unwrap();
        let second = CoverStore::with_cache_dir(Some(&dir));
        let b = second.phi_object(&sq).unwrap();
        assert_eq!(a.entry.eps, b.entry.eps);
        assert_eq!(a.entry.mu, b.entry.mu);
        assert_eq!(a.entry.sub_legs, b.entry.sub_legs);
        let swap = automorphisms(&sq).into_iter().find(|g| g.map()[1] != 1).unwrap();
        assert_eq!(first.phi_iso(&swap).unwrap().atom_perm, second.phi_iso(&swap).unwrap().atom_perm);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn bool_map_embedding_test() {
        let m = BoolMap { src_atoms: 2, dst_atoms: 2, images: vec![from_mask(2, 0b11), from_mask(2, 0b01)] };
        assert!(!m.is_embedding());
        let collapse = BoolMap { src_atoms: 2, dst_atoms: 1, images: vec![from_mask(1, 1), from_mask(1, 1)] };
        assert!(!collapse.is_embedding());
        assert!(BoolMap::identity(3).is_embedding());
    }

    #[test]
    fn phi_star_of_a_relabeled_chain() {
        let store = CoverStore::new();
        let c4 = arc(Semilattice::chain(4).permuted(&[0, 2, 3, 1]));
        let star = phi_star(&c4, &store).unwrap();
        assert_eq!(star.table.size(), 12);
        let back = star.eps_upper.then(&star.mu_upper).unwrap();
        assert!(back.same_map(&Morphism::identity(c4.clone())));
    }

    #[test]
    fn trimming_drops_atoms_sent_to_zero() {
        let store = CoverStore::new();
        let c3 = arc(Semilattice::chain(3));
        let mut e = (*store.phi_object(&c3).unwrap().entry).clone();
        e.atoms = 3;
        e.mu.push(0);
        e.eps = e.eps.iter().map(|x| from_mask(3, to_mask(x))).collect();
        let t = trim_entry(&e);
        assert_eq!(t.kept, vec![0, 1]);
        assert_eq!(t.b.ones().collect::<Vec<_>>(), vec![2]);
        assert_eq!(t.mu, e.mu[..2].to_vec());
        assert!(t.eps.iter().zip(&e.eps).all(|(a, b)| to_mask(a) == to_mask(b)));
        let report = trim_zero(&store);
        assert_eq!(report.trimmed, 0);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn retracting_a_chain_system() {
        let store = CoverStore::new();
        let two = arc(Semilattice::chain(2));
        let c3 = arc(Semilattice::chain(3));
        let f = Morphism::new(two.clone(), c3.clone(), vec![0, 2]).unwrap();
        let sys = DirectSystem::new(crate::lattice::Poset::chain(2), vec![two, c3], [((0, 1), f)]).unwrap();
        let r = retract_system(&sys, &store).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.transitions.len(), 1);
        assert!(r.transitions[0].1.preserves_unit());
    }

    #[test]
    fn size_bounds_hold_for_small_chains() {
        let store = CoverStore::new();
        for n in 1..=4 {
            store.phi_object(&arc(Semilattice::chain(n))).unwrap();
        }
        let report = size_bound_report(&store);
        assert!(report.ok());
        let c3 = report.lines.iter().find(|l| l.size == 3).unwrap();
        // n = 2, φ(2) = 2: exponent 3 + 4·2
        assert_eq!(c3.bound_exponent, 11);
        assert_eq!(c3.phi_star_size, 3);
    }
}

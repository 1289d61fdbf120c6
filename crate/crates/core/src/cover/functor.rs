//! `Φ` on isomorphisms and embeddings.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::store::CoverStore;
use super::{BoolMap, CoverEntry};
use crate::error::{Error, Result};
use crate::lattice::{canonical_form, require_distributive, Morphism};

/// `Φ_*(g)` and `Φ(g)` for an isomorphism `g`. Both permute atoms:
/// `Φ(g)({t}) = {atom_perm[t]}`; `star` is the explicit `Φ_*(g)` when the
/// colimit is materialized.
#[derive(Clone, Debug)]
pub struct PhiIso {
    pub atom_perm: Vec<usize>,
    pub phi: BoolMap,
    pub star: Option<Morphism>,
}

impl CoverStore {
    /// Atom permutation of `Φ(g)` for an automorphism `g` of the canonical
    /// object of `e`, determined by `ḡ ∘ ε^A = ε^A ∘ g` and
    /// `ḡ ∘ Φ_*(u) = Φ_*(g ∘ u)`: an atom `m` goes to the atom lying in the
    /// transported generators exactly where `m` lies in the original ones.
    pub(crate) fn phi_aut(&self, e: &CoverEntry, g: &[usize]) -> Result<Arc<Vec<usize>>> {
        if g.iter().enumerate().all(|(i, &x)| i == x) {
            return Ok(Arc::new((0..e.atoms).collect()));
        }
        let memo = (e.key.clone(), g.to_vec());
        if let Some(p) = self.auts.read().get(&memo) {
            return Ok(p.clone());
        }
        let mut orig: Vec<&FixedBitSet> = Vec::new();
        let mut moved: Vec<FixedBitSet> = Vec::new();
        for a in e.object.elements() {
            orig.push(&e.eps[a]);
            moved.push(e.eps[g[a]].clone());
        }
        let index: HashMap<&[usize], usize> =
            e.subobjects[..e.subobjects.len() - 1].iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        for (i, sub) in e.subobjects[..e.subobjects.len() - 1].iter().enumerate() {
            let mut image: Vec<usize> = sub.iter().map(|&x| g[x]).collect();
            image.sort_unstable();
            let j = *index.get(image.as_slice()).ok_or_else(|| Error::Internal("automorphism moves a subobject out".into()))?;
            // h = r_{gX} ∘ g ∘ r_X⁻¹ on the canonical form of X
            let (ri, rj) = (&e.sub_isos[i], &e.sub_isos[j]);
            let mut h = vec![0usize; ri.len()];
            for (p, &x) in sub.iter().enumerate() {
                let q = e.subobjects[j].binary_search(&g[x]).expect("image lies in gX");
                h[ri[p]] = rj[q];
            }
            let sub_entry = self.require(&e.sub_keys[i])?;
            let pi = self.phi_aut(&sub_entry, &h)?;
            for t in 0..e.sub_legs[i].src_atoms {
                orig.push(&e.sub_legs[i].images[t]);
                moved.push(e.sub_legs[j].images[pi[t]].clone());
            }
        }
        let signature = |gens: &[&FixedBitSet], m: usize| -> Vec<bool> { gens.iter().map(|s| s.contains(m)).collect() };
        let moved_refs: Vec<&FixedBitSet> = moved.iter().collect();
        let target: HashMap<Vec<bool>, usize> = (0..e.atoms).map(|m| (signature(&moved_refs, m), m)).collect();
        let mut perm = Vec::with_capacity(e.atoms);
        for m in 0..e.atoms {
            let t = target
                .get(&signature(&orig, m))
                .ok_or_else(|| Error::Internal("transported generators do not determine an automorphism".into()))?;
            perm.push(*t);
        }
        let mut seen = vec![false; e.atoms];
        for &p in &perm {
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::Internal("transported atom map is not bijective".into()));
            }
        }
        let pm = BoolMap::from_perm(&perm);
        if orig.iter().zip(&moved).any(|(o, m)| pm.apply(o) != *m) {
            return Err(Error::Internal("atom permutation does not carry generators to their transports".into()));
        }
        let perm = Arc::new(perm);
        self.auts.write().insert(memo, perm.clone());
        Ok(perm)
    }

    /// `Φ(f)` for a ⟨∨,0⟩-embedding `f: X → Y` of distributive semilattices,
    /// as a map `Φ(X) → Φ(Y)`. Factors `f` as an isomorphism onto its image
    /// followed by the image's inclusion.
    pub fn phi_embedding(&self, f: &Morphism) -> Result<BoolMap> {
        if !f.is_embedding() {
            return Err(Error::NotEmbedding);
        }
        require_distributive(f.src())?;
        require_distributive(f.dst())?;
        let (cx, rx) = canonical_form(f.src())?;
        let (cy, ry) = canonical_form(f.dst())?;
        let ex = self.canonical_entry(&cx)?;
        let ey = self.canonical_entry(&cy)?;
        let rx_inv = rx.inverse()?;
        let fc: Vec<usize> = cx.elements().map(|c| ry.apply(f.apply(rx_inv.apply(c)))).collect();
        if fc.len() == cy.size() {
            let perm = self.phi_aut(&ey, &fc)?;
            return Ok(BoolMap::from_perm(&perm));
        }
        let mut image = fc.clone();
        image.sort_unstable();
        let j = ey.subobjects.iter().position(|s| *s == image).ok_or_else(|| Error::Internal("image is not a subobject".into()))?;
        if ey.sub_keys[j] != ex.key {
            return Err(Error::Internal("image subobject has the wrong canonical form".into()));
        }
        let mut h = vec![0usize; fc.len()];
        for (c, &y) in fc.iter().enumerate() {
            h[c] = ey.sub_isos[j][image.binary_search(&y).unwrap()];
        }
        let perm = self.phi_aut(&ex, &h)?;
        BoolMap::from_perm(&perm).then(&ey.sub_legs[j])
    }

    /// `Φ_*(g)` and `Φ(g)` for an isomorphism `g: A → A'`, with the squares
    /// `Φ(g) ∘ ε_A = ε_{A'} ∘ g` and `μ_{A'} ∘ Φ(g) = g ∘ μ_A` checked.
    pub fn phi_iso(&self, g: &Morphism) -> Result<PhiIso> {
        if !g.is_iso() {
            return Err(Error::NotIso);
        }
        let src = self.phi_object(g.src())?;
        let dst = self.phi_object(g.dst())?;
        let phi = self.phi_embedding(g)?;
        let atom_perm: Vec<usize> = phi.images.iter().map(|im| im.ones().next().expect("singleton")).collect();
        for x in g.src().elements() {
            if phi.apply(src.eps(x)) != *dst.eps(g.apply(x)) {
                return Err(Error::Internal("Φ(g) ∘ ε ≠ ε ∘ g".into()));
            }
        }
        for t in 0..src.atoms() {
            if dst.mu_atom(atom_perm[t]) != g.apply(src.mu_atom(t)) {
                return Err(Error::Internal("μ ∘ Φ(g) ≠ g ∘ μ".into()));
            }
        }
        let star = match &src.entry.star {
            Some(s) => {
                // same canonical object on both sides; Φ_*(g) moves η-images by the atom permutation
                let t = dst.entry.star.as_ref().expect("same entry");
                let index: HashMap<&FixedBitSet, usize> = t.eta.iter().enumerate().map(|(i, e)| (e, i)).collect();
                let map = s.eta.iter().map(|e| index[&phi.apply(e)]).collect();
                Some(Morphism::new(s.table.clone(), t.table.clone(), map)?)
            }
            None => None,
        };
        Ok(PhiIso { atom_perm, phi, star })
    }

    /// `Φ(f)` with both naturality squares and embedding-ness checked.
    pub fn phi_morphism(&self, f: &Morphism) -> Result<BoolMap> {
        let phi = self.phi_embedding(f)?;
        let x = self.phi_object(f.src())?;
        let y = self.phi_object(f.dst())?;
        for a in f.src().elements() {
            if phi.apply(x.eps(a)) != *y.eps(f.apply(a)) {
                return Err(Error::Internal(format!("Φ(f) ∘ ε_X ≠ ε_Y ∘ f at {a}")));
            }
        }
        for t in 0..x.atoms() {
            if y.mu(&phi.images[t]) != f.apply(x.mu_atom(t)) {
                return Err(Error::Internal(format!("μ_Y ∘ Φ(f) ≠ f ∘ μ_X at atom {t}")));
            }
        }
        if !phi.is_embedding() {
            return Err(Error::Internal("Φ(f) is not an embedding".into()));
        }
        if f.flags().preserves_unit && !phi.preserves_unit() {
            return Err(Error::Internal("Φ(f) does not preserve the unit".into()));
        }
        Ok(phi)
    }
}

pub fn phi_morphism(f: &Morphism, store: &CoverStore) -> Result<BoolMap> {
    store.phi_morphism(f)
}

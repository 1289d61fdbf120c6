//! The Boolean shelter `B(S) = 𝔓(M(S))` of a finite lattice, the embedding
//! `η_S(a) = { u ∈ M(S) : a ≰ u }`, and largest extensions.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{canonical_form, meet_irreducibles, require_distributive, Morphism, Semilattice};

/// Largest number of atoms for which `B(S)` is materialized as a table.
pub const SHELTER_TABLE_CAP: usize = 10;

#[derive(Clone, Debug)]
pub struct ShelterResult {
    pub base: Arc<Semilattice>,
    /// element `i` is the subset of `mirr` with bitmask `i`
    pub booleanized: Arc<Semilattice>,
    pub eta: Morphism,
    /// `M(S)` in increasing element order; atom `t` of `B(S)` is `mirr[t]`
    pub mirr: Vec<usize>,
}

/// `η_S(a)` as a bitmask over `M(S)`.
pub fn eta_mask(s: &Semilattice, mirr: &[usize], a: usize) -> usize {
    mirr.iter().enumerate().filter(|&(_, &u)| !s.leq(a, u)).fold(0, |m, (t, _)| m | 1 << t)
}

pub fn shelter_object(s: &Arc<Semilattice>) -> Result<ShelterResult> {
    let mirr = meet_irreducibles(s);
    if mirr.len() > SHELTER_TABLE_CAP {
        return Err(Error::SizeCapExceeded {
            what: "shelter atoms".into(),
            needed: mirr.len() as u128,
            cap: SHELTER_TABLE_CAP as u128,
        });
    }
    let b = Arc::new(Semilattice::boolean(mirr.len()));
    let map = s.elements().map(|a| eta_mask(s, &mirr, a)).collect();
    let eta = Morphism::new(s.clone(), b.clone(), map)
        .map_err(|e| Error::Internal(format!("eta is not a homomorphism: {e}")))?;
    if !eta.is_embedding() || !eta.flags().preserves_unit {
        return Err(Error::Internal("eta is not a unital embedding".into()));
    }
    Ok(ShelterResult { base: s.clone(), booleanized: b, eta, mirr })
}

/// `B(f)` for an isomorphism `f: S -> T`: the image map on subsets of `M(S)`.
pub fn shelter_iso(f: &Morphism) -> Result<Morphism> {
    if !f.is_iso() {
        return Err(Error::NotIso);
    }
    let bs = shelter_object(f.src())?;
    let bt = shelter_object(f.dst())?;
    // isomorphisms carry M(S) onto M(T)
    let atom_image: Vec<usize> = bs
        .mirr
        .iter()
        .map(|&u| bt.mirr.iter().position(|&v| v == f.apply(u)).expect("isos preserve M"))
        .collect();
    let map = bs
        .booleanized
        .elements()
        .map(|x| atom_image.iter().enumerate().filter(|&(t, _)| x >> t & 1 == 1).fold(0, |m, (_, &a)| m | 1 << a))
        .collect();
    Ok(Morphism::trusted(bs.booleanized, bt.booleanized, map))
}

/// The largest ⟨∨,0⟩-homomorphism `h: T -> D` with `h ∘ e = g`:
/// `h(t) = ⋀ { g(s) : t ≤ e(s) }`, the empty meet being the top of `D`.
pub fn largest_extension(g: &Morphism, e: &Morphism) -> Result<Morphism> {
    if !e.is_embedding() {
        return Err(Error::NotEmbedding);
    }
    if g.src().as_ref() != e.src().as_ref() {
        return Err(Error::NotComposable);
    }
    let d = g.dst();
    require_distributive(d)?;
    let (s, t) = (e.src(), e.dst());
    let map: Vec<usize> =
        t.elements().map(|x| d.meet_all(s.elements().filter(|&a| t.leq(x, e.apply(a))).map(|a| g.apply(a)))).collect();
    let h = Morphism::new(t.clone(), d.clone(), map)
        .map_err(|err| Error::Internal(format!("largest extension into a distributive target failed: {err}")))?;
    if s.elements().any(|a| h.apply(e.apply(a)) != g.apply(a)) {
        return Err(Error::Internal("largest extension does not extend".into()));
    }
    Ok(h)
}

/// `g^B`: the largest extension of `g: S -> D` along `η_S`.
pub fn shelter_extension(g: &Morphism) -> Result<Morphism> {
    let b = shelter_object(g.src())?;
    largest_extension(g, &b.eta)
}

/// Boolean amalgam: the pushout of two embeddings followed by `η` of its apex.
pub fn amalgamate_boolean(phi: &Morphism, eps0: &Morphism) -> Result<(Arc<Semilattice>, Morphism, Morphism)> {
    let p = crate::colimit::pushout_amalgamate(phi, eps0)?;
    let b = shelter_object(&p.apex)?;
    Ok((b.booleanized, p.leg1.then(&b.eta)?, p.leg2.then(&b.eta)?))
}

/// One instance of the shelter laws.
#[derive(Clone, Debug)]
pub enum ShelterSample {
    /// iso `f: S -> S'` and homomorphism `g: S' -> D`: `g^B ∘ B(f) = (g ∘ f)^B`
    Precompose { f: Morphism, g: Morphism },
    /// homomorphism `h: S -> D` and iso `u: D -> D'`: `(u ∘ h)^B = u ∘ h^B`
    Postcompose { h: Morphism, u: Morphism },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ShelterLawReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl ShelterLawReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_shelter_laws(samples: &[ShelterSample]) -> ShelterLawReport {
    let mut report = ShelterLawReport::default();
    for (i, sample) in samples.iter().enumerate() {
        report.checked += 1;
        let outcome = match sample {
            ShelterSample::Precompose { f, g } => (|| {
                let lhs = shelter_iso(f)?.then(&shelter_extension(g)?)?;
                let rhs = shelter_extension(&f.then(g)?)?;
                Ok::<bool, Error>(lhs.map() == rhs.map())
            })(),
            ShelterSample::Postcompose { h, u } => (|| {
                let lhs = shelter_extension(&h.then(u)?)?;
                let rhs = shelter_extension(h)?.then(u)?;
                Ok::<bool, Error>(lhs.map() == rhs.map())
            })(),
        };
        match outcome {
            Ok(true) => {}
            Ok(false) => report.violations.push(format!("sample {i}: {sample:?}")),
            Err(e) => report.violations.push(format!("sample {i}: {e}")),
        }
    }
    report
}

/// Exhaustive samples over the given objects: every automorphism `f` of
/// every object paired with every homomorphism into every distributive
/// target, and symmetrically for the postcomposition law.
pub fn exhaustive_shelter_samples(objects: &[Arc<Semilattice>], per_pair_limit: usize) -> Vec<ShelterSample> {
    let mut out = Vec::new();
    let targets: Vec<Arc<Semilattice>> =
        objects.iter().filter(|d| crate::lattice::is_distributive(d)).cloned().collect();
    for s in objects {
        let auts = crate::lattice::automorphisms(s);
        for d in &targets {
            let homs = crate::lattice::homomorphisms(s, d, per_pair_limit);
            for f in &auts {
                for h in &homs {
                    let g = Morphism::trusted(s.clone(), d.clone(), h.clone());
                    out.push(ShelterSample::Precompose { f: f.clone(), g });
                }
            }
            for u in crate::lattice::automorphisms(d) {
                for h in &homs {
                    let h = Morphism::trusted(s.clone(), d.clone(), h.clone());
                    out.push(ShelterSample::Postcompose { h, u: u.clone() });
                }
            }
        }
    }
    out
}

/// Canonical representative and its shelter; handy for isomorphism-invariant reporting.
pub fn canonical_shelter(s: &Arc<Semilattice>) -> Result<ShelterResult> {
    let (c, _) = canonical_form(s)?;
    shelter_object(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{homomorphisms, is_boolean};

    fn arc(s: Semilattice) -> Arc<Semilattice> {
        Arc::new(s)
    }

    #[test]
    fn trivial_shelter() {
        let b = shelter_object(&arc(Semilattice::chain(1))).unwrap();
        assert_eq!(b.booleanized.size(), 1);
    }

    #[test]
    fn chain3_shelter() {
        let b = shelter_object(&arc(Semilattice::chain(3))).unwrap();
        assert_eq!(b.mirr, vec![0, 1]);
        assert_eq!(b.eta.map(), &[0b00, 0b01, 0b11]);
        assert!(is_boolean(&b.booleanized));
    }

    #[test]
    fn square_shelter_is_iso() {
        let b = shelter_object(&arc(Semilattice::boolean(2))).unwrap();
        assert!(b.eta.is_iso());
    }

    #[test]
    fn swap_acts_on_atoms() {
        let sq = arc(Semilattice::boolean(2));
        let swap = Morphism::new(sq.clone(), sq.clone(), vec![0, 2, 1, 3]).unwrap();
        let bf = shelter_iso(&swap).unwrap();
        assert_eq!(bf.map(), &[0, 2, 1, 3]);
        assert_eq!(shelter_iso(&Morphism::identity(sq.clone())).unwrap(), Morphism::identity(bf.src().clone()));
        let b = shelter_object(&sq).unwrap();
        assert_eq!(b.eta.then(&bf).unwrap().map(), swap.then(&b.eta).unwrap().map());
    }

    #[test]
    fn extension_examples() {
        let two = arc(Semilattice::chain(2));
        let h = shelter_extension(&Morphism::identity(two)).unwrap();
        assert_eq!(h.map(), &[0, 1]);
        assert!(h.is_iso());

        let c3 = arc(Semilattice::chain(3));
        let h = shelter_extension(&Morphism::identity(c3)).unwrap();
        // bitmasks: {0} = 1, {a} = 2, {0,a} = 3
        assert_eq!(h.map(), &[0, 1, 2, 2]);
    }

    #[test]
    fn extension_along_iso() {
        let sq = arc(Semilattice::boolean(2));
        let c3 = arc(Semilattice::chain(3));
        let swap = Morphism::new(sq.clone(), sq.clone(), vec![0, 2, 1, 3]).unwrap();
        let g = Morphism::new(sq.clone(), c3, vec![0, 1, 2, 2]).unwrap();
        let h = largest_extension(&g, &swap).unwrap();
        assert_eq!(h.map(), swap.inverse().unwrap().then(&g).unwrap().map());
    }

    #[test]
    fn rejects_non_distributive_target() {
        let m3 = arc(Semilattice::diamond());
        let err = shelter_extension(&Morphism::identity(m3)).unwrap_err();
        assert!(matches!(err, Error::NotDistributive { .. }));
    }

    #[test]
    fn extension_is_largest() {
        let objs = [Semilattice::chain(3), Semilattice::boolean(2), Semilattice::chain(4)];
        for s in objs.iter().cloned().map(arc) {
            for d in objs.iter().cloned().map(arc) {
                let b = shelter_object(&s).unwrap();
                for gm in homomorphisms(&s, &d, usize::MAX) {
                    let g = Morphism::trusted(s.clone(), d.clone(), gm);
                    let h = largest_extension(&g, &b.eta).unwrap();
                    for other in homomorphisms(&b.booleanized, &d, usize::MAX) {
                        if s.elements().all(|a| other[b.eta.apply(a)] == g.apply(a)) {
                            assert!(b.booleanized.elements().all(|t| d.leq(other[t], h.apply(t))));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn laws_hold_on_small_objects() {
        let objs: Vec<_> = [Semilattice::chain(2), Semilattice::chain(3), Semilattice::boolean(2)]
            .into_iter()
            .map(arc)
            .collect();
        let samples = exhaustive_shelter_samples(&objs, usize::MAX);
        assert!(!samples.is_empty());
        let r = verify_shelter_laws(&samples);
        assert!(r.ok(), "{:?}", r.violations);
    }
}

//! The extension GS(K): two fresh atoms below every nonzero
//! non-atom, giving a simple atomistic extension that retracts onto the base.

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use crate::colimit::quotient;
use crate::error::{Error, Result};
use crate::lattice::{is_atomistic, lattice_congruence_generated, Morphism, Partition, Semilattice};

/// `GS(K)` with its inclusion and retraction. Elements of `K` keep their
/// indices; `p_a^i` follows them, ordered by `a` and then `i`.
#[derive(Clone, Debug)]
pub struct GSResult {
    pub base: Arc<Semilattice>,
    pub extended: Arc<Semilattice>,
    pub eps: Morphism,
    pub mu: Morphism,
    /// `(a, [p_a^0, p_a^1])` for every `a` in `NAt K`, in increasing `a`
    pub new_atoms: Vec<(usize, [usize; 2])>,
}

impl GSResult {
    pub fn new_atom(&self, a: usize, i: usize) -> Option<usize> {
        self.new_atoms.iter().find(|(b, _)| *b == a).map(|(_, p)| p[i])
    }
}

/// Nonzero elements of `k` that are not atoms.
pub fn non_atoms(k: &Semilattice) -> Vec<usize> {
    let atoms = k.atoms();
    k.elements().filter(|&x| x != k.zero() && !atoms.contains(&x)).collect()
}

pub fn gs_object(k: &Arc<Semilattice>) -> Result<GSResult> {
    let n = k.size();
    let nat = non_atoms(k);
    let m = n + 2 * nat.len();
    // origin of each element: Ok(x) for x in K, Err(a) for p_a^i
    let origin = |x: usize| if x < n { Ok(x) } else { Err(nat[(x - n) / 2]) };
    let leq = |x: usize, y: usize| match (origin(x), origin(y)) {
        (Ok(a), Ok(b)) => k.leq(a, b),
        (Err(a), Ok(b)) => k.leq(a, b),
        (Ok(a), Err(_)) => a == k.zero(),
        (Err(_), Err(_)) => x == y,
    };
    let mut ext = Semilattice::from_order(m, k.zero(), leq)?;
    let labels: Vec<String> = (0..m)
        .map(|x| match origin(x) {
            Ok(a) => k.label(a),
            Err(a) => format!("p[{}]{}", k.label(a), (x - n) % 2),
        })
        .collect();
    ext = ext.with_labels(labels);
    let ext = Arc::new(ext);
    let eps = Morphism::new(k.clone(), ext.clone(), (0..n).collect())?;
    let mu_map = (0..m).map(|x| origin(x).unwrap_or_else(|a| a)).collect();
    let mu = Morphism::new(ext.clone(), k.clone(), mu_map)?;
    for x in k.elements() {
        for y in k.elements() {
            if ext.meet(x, y) != k.meet(x, y) {
                return Err(Error::Internal(format!("GS inclusion does not preserve the meet of {x} and {y}")));
            }
        }
    }
    let new_atoms = nat.iter().enumerate().map(|(i, &a)| (a, [n + 2 * i, n + 2 * i + 1])).collect();
    Ok(GSResult { base: k.clone(), extended: ext, eps, mu, new_atoms })
}

/// `GS(f)`: identity on the base, `p_a^i ↦ p_{f(a)}^i`. Both squares and the
/// lattice-homomorphism flag are checked.
pub fn gs_morphism(f: &Morphism) -> Result<Morphism> {
    let (x, y) = (gs_object(f.src())?, gs_object(f.dst())?);
    gs_morphism_between(f, &x, &y)
}

pub fn gs_morphism_between(f: &Morphism, x: &GSResult, y: &GSResult) -> Result<Morphism> {
    if !f.is_embedding() {
        return Err(Error::NotEmbedding);
    }
    let n = x.base.size();
    let mut map: Vec<usize> = (0..n).map(|a| f.apply(a)).collect();
    for &(a, _) in &x.new_atoms {
        for i in 0..2 {
            let p = y
                .new_atom(f.apply(a), i)
                .ok_or_else(|| Error::IllFormed(format!("image of non-atom {a} is an atom or zero")))?;
            map.push(p);
        }
    }
    let g = Morphism::new(x.extended.clone(), y.extended.clone(), map)?;
    if !g.is_embedding() {
        return Err(Error::Internal("GS(f) is not an embedding".into()));
    }
    if x.base.elements().any(|a| g.apply(x.eps.apply(a)) != y.eps.apply(f.apply(a))) {
        return Err(Error::Internal("GS(f) ∘ ε ≠ ε ∘ f".into()));
    }
    if x.extended.elements().any(|p| y.mu.apply(g.apply(p)) != f.apply(x.mu.apply(p))) {
        return Err(Error::Internal("μ ∘ GS(f) ≠ f ∘ μ".into()));
    }
    if f.flags().is_lattice_hom && !g.flags().is_lattice_hom {
        return Err(Error::Internal("GS(f) is not a lattice homomorphism".into()));
    }
    Ok(g)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GsReport {
    pub base_size: usize,
    pub size: usize,
    pub atoms: usize,
    /// `(x, y, z)` with `x ⊕ z = y ⊕ z`, per pair of distinct atoms
    pub perspectivity: Vec<(usize, usize, usize)>,
    pub congruences: Option<usize>,
    pub violations: Vec<String>,
}

impl GsReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn direct_sum(s: &Semilattice, x: usize, p: usize, y: usize) -> bool {
    s.join(x, p) == y && s.meet(x, p) == s.zero()
}

/// Checks the structural properties of `GS(k)`: atom count, retraction,
/// inclusion preserving meets and joins, every element a join of at most two
/// atoms, relative complements by atoms, perspectivity of all atom pairs
/// with witnesses, and (for `|k| ≥ 2`) that the lattice has exactly two
/// congruences.
pub fn gs_checks(k: &Arc<Semilattice>) -> Result<GsReport> {
    let gs = gs_object(k)?;
    let s = &gs.extended;
    let atoms = s.atoms();
    let mut r = GsReport { base_size: k.size(), size: s.size(), atoms: atoms.len(), ..Default::default() };
    let expected = k.atoms().len() + 2 * non_atoms(k).len();
    if atoms.len() != expected {
        r.violations.push(format!("{} atoms, expected {expected}", atoms.len()));
    }
    if k.elements().any(|a| gs.mu.apply(gs.eps.apply(a)) != a) {
        r.violations.push("μ ∘ ε ≠ id".into());
    }
    for a in k.elements() {
        for b in k.elements() {
            if s.join(a, b) != k.join(a, b) || s.meet(a, b) != k.meet(a, b) {
                r.violations.push(format!("inclusion does not preserve ∨/∧ at ({a}, {b})"));
            }
        }
    }
    if !is_atomistic(s) {
        r.violations.push("not atomistic".into());
    }
    for x in s.elements() {
        let ok = x == s.zero()
            || atoms.contains(&x)
            || atoms.iter().any(|&p| atoms.iter().any(|&q| s.join(p, q) == x));
        if !ok {
            r.violations.push(format!("{} is not a join of two atoms", s.label(x)));
        }
    }
    for x in s.elements().filter(|&x| x != s.zero()) {
        for y in s.elements().filter(|&y| s.lt(x, y)) {
            if !atoms.iter().any(|&p| direct_sum(s, x, p, y)) {
                r.violations.push(format!("no atom p with {} = {} ⊕ p", s.label(y), s.label(x)));
            }
        }
    }
    for (i, &x) in atoms.iter().enumerate() {
        for &y in &atoms[i + 1..] {
            let w = s.elements().find(|&z| {
                s.meet(x, z) == s.zero() && s.meet(y, z) == s.zero() && s.join(x, z) == s.join(y, z)
            });
            match w {
                Some(z) => r.perspectivity.push((x, y, z)),
                None => r.violations.push(format!("atoms {} and {} are not perspective", s.label(x), s.label(y))),
            }
        }
    }
    if k.size() >= 2 {
        let count = lattice_congruences(s).len();
        r.congruences = Some(count);
        if count != 2 {
            r.violations.push(format!("{count} lattice congruences, expected 2"));
        }
    }
    Ok(r)
}

/// All lattice congruences, as joins of principal ones generated by cover
/// pairs, in discovery order (the discrete one first).
pub fn lattice_congruences(s: &Semilattice) -> Vec<Partition> {
    let principal: Vec<Partition> =
        s.cover_pairs().into_iter().map(|(x, y)| lattice_congruence_generated(s, &[(x, y)])).collect();
    let pairs_of = |p: &Partition| -> Vec<(usize, usize)> {
        p.classes().into_iter().flat_map(|c| c[1..].iter().map(|&y| (c[0], y)).collect::<Vec<_>>()).collect()
    };
    let discrete = Partition::discrete(s.size());
    let mut seen: HashSet<Partition> = HashSet::from([discrete.clone()]);
    let mut out = vec![discrete];
    let mut next = 0;
    while next < out.len() {
        let base = pairs_of(&out[next]);
        next += 1;
        for p in &principal {
            let mut pairs = base.clone();
            pairs.extend(pairs_of(p));
            let joined = lattice_congruence_generated(s, &pairs);
            if seen.insert(joined.clone()) {
                out.push(joined);
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AtomisticImageReport {
    pub source_size: usize,
    pub image_size: usize,
    pub source_atomistic: bool,
    pub image_atomistic: bool,
    /// an image element that is not a join of atoms
    pub witness: Option<usize>,
}

impl AtomisticImageReport {
    /// The image of an atomistic lattice must be atomistic.
    pub fn ok(&self) -> bool {
        !self.source_atomistic || self.image_atomistic
    }
}

/// Checks that the image of `l` under the surjective lattice homomorphism `g` is atomistic.
pub fn atomistic_image_check(l: &Semilattice, g: &Morphism) -> Result<AtomisticImageReport> {
    if g.src().size() != l.size() || g.src().as_ref() != l {
        return Err(Error::IllFormed("morphism source differs from the given lattice".into()));
    }
    if !g.flags().surjective {
        return Err(Error::NotSurjective);
    }
    if !g.flags().is_lattice_hom {
        return Err(Error::NotLatticeHom);
    }
    let k = g.dst();
    let atoms = k.atoms();
    let witness = k.elements().find(|&x| k.join_all(atoms.iter().copied().filter(|&a| k.leq(a, x))) != x);
    Ok(AtomisticImageReport {
        source_size: l.size(),
        image_size: k.size(),
        source_atomistic: is_atomistic(l),
        image_atomistic: witness.is_none(),
        witness,
    })
}

/// Every surjective lattice homomorphism out of `l`, one per lattice
/// congruence, as the projection onto the quotient.
pub fn surjective_lattice_images(l: &Arc<Semilattice>) -> Result<Vec<Morphism>> {
    lattice_congruences(l).iter().map(|p| quotient(l, p).map(|(_, proj)| proj)).collect()
}

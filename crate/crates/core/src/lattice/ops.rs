use std::collections::BTreeSet;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::{Morphism, Semilattice};
use crate::error::{Error, Result};

/// An equivalence relation on `0..n`, normalized so that classes are numbered
/// in order of their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    class_of: Vec<usize>,
}

impl Partition {
    pub fn discrete(n: usize) -> Self {
        Partition { class_of: (0..n).collect() }
    }

    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let class_of = labels
            .iter()
            .map(|l| {
                let next = remap.len();
                *remap.entry(*l).or_insert(next)
            })
            .collect();
        Partition { class_of }
    }

    pub(crate) fn from_union_find(uf: &UnionFind<usize>, n: usize) -> Self {
        let labels: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
        Self::from_labels(&labels)
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn num_classes(&self) -> usize {
        self.class_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn same(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    pub fn is_discrete(&self) -> bool {
        self.num_classes() == self.len()
    }

    pub fn is_total(&self) -> bool {
        self.num_classes() <= 1
    }
}

/// Classification flags of a finite semilattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub distributive: bool,
    pub boolean: bool,
    pub atomistic: bool,
    pub lattice_simple: bool,
}

/// Returns the sub-semilattice carried by `set` (which must contain zero and be
/// join-closed) with elements in increasing order of their index in `s`, plus
/// the inclusion.
pub fn subsemilattice(s: &Arc<Semilattice>, set: &[usize]) -> Result<(Arc<Semilattice>, Morphism)> {
    let mut elems: Vec<usize> = set.to_vec();
    elems.sort_unstable();
    elems.dedup();
    let mut pos = vec![usize::MAX; s.size()];
    for (i, &x) in elems.iter().enumerate() {
        if x >= s.size() {
            return Err(Error::IndexOutOfRange { index: x, size: s.size() });
        }
        pos[x] = i;
    }
    if pos[s.zero()] == usize::MAX {
        return Err(Error::IllFormed("subset does not contain zero".into()));
    }
    let m = elems.len();
    let mut join = vec![0u32; m * m];
    for (i, &x) in elems.iter().enumerate() {
        for (j, &y) in elems.iter().enumerate() {
            let p = pos[s.join(x, y)];
            if p == usize::MAX {
                return Err(Error::IllFormed(format!("subset not join-closed at ({x}, {y})")));
            }
            join[i * m + j] = p as u32;
        }
    }
    let mut sub = Semilattice::trusted(m, join, pos[s.zero()]);
    if let Some(l) = s.labels() {
        sub = sub.with_labels(elems.iter().map(|&x| l[x].clone()).collect());
    }
    let sub = Arc::new(sub);
    let incl = Morphism::trusted(sub.clone(), s.clone(), elems);
    Ok((sub, incl))
}

/// Join-closure of `seed ∪ {0}` as a sorted element list.
pub fn join_closure(s: &Semilattice, seed: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut set: BTreeSet<usize> = seed.into_iter().collect();
    set.insert(s.zero());
    let mut frontier: Vec<usize> = set.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        let current: Vec<usize> = set.iter().copied().collect();
        for y in current {
            let j = s.join(x, y);
            if set.insert(j) {
                frontier.push(j);
            }
        }
    }
    set.into_iter().collect()
}

/// The smallest ⟨∨,0⟩-subsemilattice containing `seed`, with its inclusion.
pub fn generated_subsemilattice(s: &Arc<Semilattice>, seed: &[usize]) -> Result<(Arc<Semilattice>, Morphism)> {
    if let Some(&bad) = seed.iter().find(|&&x| x >= s.size()) {
        return Err(Error::IndexOutOfRange { index: bad, size: s.size() });
    }
    let set = join_closure(s, seed.iter().copied());
    subsemilattice(s, &set)
}

/// Join-irreducible elements `J(S)` and meet-irreducible elements `M(S)`.
///
/// `M(S)` is taken inside `S` minus its top, so a trivial semilattice has none.
pub fn irreducibles(s: &Semilattice) -> (Vec<usize>, Vec<usize>) {
    let j = s.elements().filter(|&x| x != s.zero() && s.lower_covers(x).len() == 1).collect();
    let m = s.elements().filter(|&x| x != s.top() && s.upper_covers(x).len() == 1).collect();
    (j, m)
}

pub fn join_irreducibles(s: &Semilattice) -> Vec<usize> {
    irreducibles(s).0
}

pub fn meet_irreducibles(s: &Semilattice) -> Vec<usize> {
    irreducibles(s).1
}

/// First violation of distributivity: `c <= a v b` with `c != (c ^ a) v (c ^ b)`.
pub fn distributivity_witness(s: &Semilattice) -> Option<(usize, usize, usize)> {
    for a in s.elements() {
        for b in s.elements() {
            let ab = s.join(a, b);
            for c in s.down_set(ab).ones() {
                if s.join(s.meet(c, a), s.meet(c, b)) != c {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

pub fn is_distributive(s: &Semilattice) -> bool {
    distributivity_witness(s).is_none()
}

pub fn require_distributive(s: &Semilattice) -> Result<()> {
    match distributivity_witness(s) {
        None => Ok(()),
        Some((a, b, c)) => Err(Error::NotDistributive { a, b, c }),
    }
}

pub fn is_atomistic(s: &Semilattice) -> bool {
    let atoms = s.atoms();
    s.elements().all(|x| s.join_all(atoms.iter().copied().filter(|&a| s.leq(a, x))) == x)
}

pub fn is_boolean(s: &Semilattice) -> bool {
    let k = s.atoms().len();
    k < usize::BITS as usize && s.size() == 1usize << k && is_atomistic(s) && is_distributive(s)
}

/// `true` iff the lattice reduct has exactly two congruences.
pub fn is_lattice_simple(s: &Semilattice) -> bool {
    if s.size() < 2 {
        return false;
    }
    // every nontrivial congruence identifies some cover pair
    s.cover_pairs().into_iter().all(|(x, y)| lattice_congruence_generated(s, &[(x, y)]).is_total())
}

pub fn classify(s: &Semilattice) -> Classification {
    let distributive = is_distributive(s);
    let atomistic = is_atomistic(s);
    let k = s.atoms().len();
    Classification {
        distributive,
        atomistic,
        boolean: distributive && atomistic && k < 64 && s.size() == 1usize << k,
        lattice_simple: is_lattice_simple(s),
    }
}

fn closure_under(s: &Semilattice, pairs: &[(usize, usize)], with_meet: bool) -> Partition {
    let n = s.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    while let Some((a, b)) = work.pop() {
        for c in 0..n {
            let (x, y) = (s.join(a, c), s.join(b, c));
            if uf.union(x, y) {
                work.push((x, y));
            }
            if with_meet {
                let (x, y) = (s.meet(a, c), s.meet(b, c));
                if uf.union(x, y) {
                    work.push((x, y));
                }
            }
        }
    }
    Partition::from_union_find(&uf, n)
}

/// Least lattice congruence containing `pairs` (compatible with ∨ and the derived ∧).
pub fn lattice_congruence_generated(s: &Semilattice, pairs: &[(usize, usize)]) -> Partition {
    closure_under(s, pairs, true)
}

/// Least ⟨∨⟩-congruence containing `pairs`.
pub fn join_congruence_generated(s: &Semilattice, pairs: &[(usize, usize)]) -> Partition {
    closure_under(s, pairs, false)
}

/// All ⟨∨,0⟩-homomorphisms `src -> dst` as element maps, up to `limit` of them,
/// enumerated by their values on the join-irreducibles of `src`.
pub fn homomorphisms(src: &Semilattice, dst: &Semilattice, limit: usize) -> Vec<Vec<usize>> {
    let ji = join_irreducibles(src);
    let mut vals = vec![0usize; ji.len()];
    let mut out = Vec::new();
    fn rec(
        i: usize,
        ji: &[usize],
        vals: &mut Vec<usize>,
        src: &Semilattice,
        dst: &Semilattice,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == ji.len() {
            let map: Vec<usize> = src
                .elements()
                .map(|x| dst.join_all(ji.iter().zip(vals.iter()).filter(|(&j, _)| src.leq(j, x)).map(|(_, &v)| v)))
                .collect();
            let ok = src.elements().all(|x| src.elements().all(|y| map[src.join(x, y)] == dst.join(map[x], map[y])));
            if ok {
                out.push(map);
            }
            return;
        }
        for v in dst.elements() {
            // monotone on the join-irreducibles already assigned
            if (0..i).all(|k| !src.leq(ji[k], ji[i]) || dst.leq(vals[k], v)) {
                vals[i] = v;
                rec(i + 1, ji, vals, src, dst, out, limit);
            }
        }
    }
    rec(0, &ji, &mut vals, src, dst, &mut out, limit);
    out
}

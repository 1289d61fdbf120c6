use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::Semilattice;
use crate::error::{Error, Result};

/// A finite poset given by cover pairs; the order is the reflexive-transitive closure.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    size: usize,
    covers: Vec<(usize, usize)>,
    // up[x] = { y : x <= y }
    up: Vec<FixedBitSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetRecord {
    pub size: usize,
    pub covers: Vec<[usize; 2]>,
}

impl Poset {
    /// Builds a poset from arbitrary strict relations `a < b`. The stored cover
    /// list is the transitive reduction.
    pub fn new(size: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let mut up = vec![FixedBitSet::with_capacity(size); size];
        for (x, u) in up.iter_mut().enumerate() {
            u.insert(x);
        }
        for &(a, b) in relations {
            if a >= size || b >= size {
                return Err(Error::IndexOutOfRange { index: a.max(b), size });
            }
            if a == b {
                return Err(Error::NotAPartialOrder(format!("self-loop at {a}")));
            }
            up[a].insert(b);
        }
        // Warshall closure
        for k in 0..size {
            for x in 0..size {
                if up[x].contains(k) {
                    let uk = up[k].clone();
                    up[x].union_with(&uk);
                }
            }
        }
        for x in 0..size {
            for y in (x + 1)..size {
                if up[x].contains(y) && up[y].contains(x) {
                    return Err(Error::NotAPartialOrder(format!("cycle through {x} and {y}")));
                }
            }
        }
        let mut covers = Vec::new();
        for x in 0..size {
            for y in up[x].ones() {
                if y != x && !up[x].ones().any(|z| z != x && z != y && up[z].contains(y)) {
                    covers.push((x, y));
                }
            }
        }
        Ok(Poset { size, covers, up })
    }

    pub fn antichain(n: usize) -> Self {
        Self::new(n, &[]).expect("antichain")
    }

    pub fn chain(n: usize) -> Self {
        let rel: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &rel).expect("chain")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    /// All comparable pairs `x <= y`, including `x == y`.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        (0..self.size).flat_map(|x| self.up[x].ones().map(move |y| (x, y))).collect()
    }

    /// Points with no strictly larger point.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.size).filter(|&x| self.up[x].count_ones(..) == 1).collect()
    }

    /// A linear extension: points sorted by number of strict predecessors.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut pts: Vec<usize> = (0..self.size).collect();
        pts.sort_by_key(|&x| ((0..self.size).filter(|&y| self.lt(y, x)).count(), x));
        pts
    }

    pub fn is_down_set(&self, set: &FixedBitSet) -> bool {
        set.ones().all(|x| (0..self.size).all(|y| !self.leq(y, x) || set.contains(y)))
    }

    /// All down-sets, each as a bitset, in a deterministic order (by size, then lexicographically
    /// on the sorted member list).
    pub fn down_sets(&self) -> Vec<FixedBitSet> {
        let order = self.linear_extension();
        let mut out = Vec::new();
        let mut cur = FixedBitSet::with_capacity(self.size);
        self.down_sets_rec(&order, 0, &mut cur, &mut out);
        out.sort_by(|a, b| {
            a.count_ones(..).cmp(&b.count_ones(..)).then_with(|| a.ones().collect::<Vec<_>>().cmp(&b.ones().collect()))
        });
        out
    }

    fn down_sets_rec(&self, order: &[usize], i: usize, cur: &mut FixedBitSet, out: &mut Vec<FixedBitSet>) {
        if i == order.len() {
            out.push(cur.clone());
            return;
        }
        let x = order[i];
        self.down_sets_rec(order, i + 1, cur, out);
        // all predecessors come earlier in the linear extension
        if (0..self.size).all(|y| !self.lt(y, x) || cur.contains(y)) {
            cur.insert(x);
            self.down_sets_rec(order, i + 1, cur, out);
            cur.set(x, false);
        }
    }

    pub fn to_record(&self) -> PosetRecord {
        PosetRecord { size: self.size, covers: self.covers.iter().map(|&(a, b)| [a, b]).collect() }
    }

    pub fn from_record(r: &PosetRecord) -> Result<Self> {
        let rel: Vec<_> = r.covers.iter().map(|c| (c[0], c[1])).collect();
        Self::new(r.size, &rel)
    }

    /// The order underlying a semilattice.
    pub fn of_semilattice(s: &Semilattice) -> Self {
        Self::new(s.size(), &s.cover_pairs()).expect("semilattice orders are posets")
    }
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poset(n={}, covers={:?})", self.size, self.covers)
    }
}

impl Serialize for Poset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PosetRecord::deserialize(d)?;
        Poset::from_record(&r).map_err(serde::de::Error::custom)
    }
}

/// The lattice of all down-sets of `p` under union, with `∅` as zero.
///
/// Element labels list the members of each down-set, e.g. `{0,2}`.
pub fn ideal_lattice(p: &Poset) -> Semilattice {
    let sets = p.down_sets();
    let n = sets.len();
    let index: std::collections::HashMap<Vec<usize>, usize> =
        sets.iter().enumerate().map(|(i, s)| (s.ones().collect(), i)).collect();
    let mut join = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut u = sets[a].clone();
            u.union_with(&sets[b]);
            join[a * n + b] = index[&u.ones().collect::<Vec<_>>()] as u32;
        }
    }
    let labels = sets
        .iter()
        .map(|s| format!("{{{}}}", s.ones().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    Semilattice::trusted(n, join, 0).with_labels(labels)
}

/// Index of the principal ideal `↓x` inside `ideal_lattice(p)`.
pub fn principal_ideal_index(p: &Poset, lattice: &Semilattice, x: usize) -> usize {
    let want = format!(
        "{{{}}}",
        (0..p.size()).filter(|&y| p.leq(y, x)).map(|y| y.to_string()).collect::<Vec<_>>().join(",")
    );
    lattice.labels().expect("ideal lattices are labelled").iter().position(|l| *l == want).expect("principal ideal")
}

use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite ⟨∨,0⟩-semilattice on the dense carrier `0..size`.
///
/// The join table is validated once at construction; order, meets, covers and
/// the top element are derived from it. Every finite ⟨∨,0⟩-semilattice is a
/// lattice, so `meet` is always defined.
#[derive(Clone)]
pub struct Semilattice {
    size: usize,
    join: Vec<u32>,
    zero: usize,
    top: usize,
    labels: Option<Vec<String>>,
    // below[y] = { x : x <= y }
    below: Vec<FixedBitSet>,
    meet: OnceLock<Vec<u32>>,
}

/// JSON shape of a semilattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilatticeRecord {
    pub size: usize,
    pub zero: usize,
    pub join: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl Semilattice {
    /// Validates a join table. Checks run in the order: shape, range,
    /// idempotence, commutativity, associativity, neutrality of `zero`.
    pub fn from_join_table(table: &[Vec<usize>], zero: usize) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for (row, r) in table.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
            if let Some(&bad) = r.iter().find(|&&v| v >= n) {
                return Err(Error::IndexOutOfRange { index: bad, size: n });
            }
        }
        if zero >= n {
            return Err(Error::IndexOutOfRange { index: zero, size: n });
        }
        let flat: Vec<u32> = table.iter().flatten().map(|&v| v as u32).collect();
        Self::from_flat(n, flat, zero)
    }

    pub(crate) fn from_flat(n: usize, join: Vec<u32>, zero: usize) -> Result<Self> {
        let j = |a: usize, b: usize| join[a * n + b] as usize;
        for x in 0..n {
            if j(x, x) != x {
                return Err(Error::NotIdempotent { x });
            }
        }
        for x in 0..n {
            for y in (x + 1)..n {
                if j(x, y) != j(y, x) {
                    return Err(Error::NotCommutative { x, y });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = j(x, y);
                for z in 0..n {
                    if j(xy, z) != j(x, j(y, z)) {
                        return Err(Error::NotAssociative { x, y, z });
                    }
                }
            }
        }
        for x in 0..n {
            if j(zero, x) != x {
                return Err(Error::ZeroNotNeutral { x });
            }
        }
        Ok(Self::trusted(n, join, zero))
    }

    /// Builds without validation. Callers guarantee the semilattice axioms.
    pub(crate) fn trusted(n: usize, join: Vec<u32>, zero: usize) -> Self {
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        let mut top = zero;
        for y in 0..n {
            for x in 0..n {
                if join[x * n + y] as usize == y {
                    below[y].insert(x);
                }
            }
            top = join[top * n + y] as usize;
        }
        Semilattice { size: n, join, zero, top, labels: None, below, meet: OnceLock::new() }
    }

    /// Builds a semilattice from an order relation by computing least upper bounds.
    /// `leq(x, y)` must be a partial order with least element `zero`.
    pub fn from_order(n: usize, zero: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for y in 0..n {
            for x in 0..n {
                if leq(x, y) {
                    below[y].insert(x);
                }
            }
        }
        for x in 0..n {
            if !below[x].contains(x) {
                return Err(Error::NotAPartialOrder(format!("{x} is not reflexive")));
            }
            if !below[x].contains(zero) {
                return Err(Error::ZeroNotNeutral { x });
            }
            for y in 0..n {
                if x != y && below[y].contains(x) && below[x].contains(y) {
                    return Err(Error::NotAPartialOrder(format!("{x} and {y} violate antisymmetry")));
                }
            }
        }
        let mut join = vec![0u32; n * n];
        for x in 0..n {
            for y in x..n {
                // upper bounds of x and y
                let ubs: Vec<usize> =
                    (0..n).filter(|&z| below[z].contains(x) && below[z].contains(y)).collect();
                let lub = ubs
                    .iter()
                    .copied()
                    .find(|&z| ubs.iter().all(|&w| below[w].contains(z)))
                    .ok_or(Error::NoJoin { x, y })?;
                join[x * n + y] = lub as u32;
                join[y * n + x] = lub as u32;
            }
        }
        Self::from_flat(n, join, zero)
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        assert!(n >= 1);
        let mut join = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                join[x * n + y] = x.max(y) as u32;
            }
        }
        Self::trusted(n, join, 0)
    }

    /// The powerset of a `k`-element set under union; element `i` is the subset with bitmask `i`.
    pub fn boolean(k: usize) -> Self {
        assert!(k < 16, "materialized Boolean semilattices are capped at 2^15 elements");
        let n = 1usize << k;
        let mut join = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                join[x * n + y] = (x | y) as u32;
            }
        }
        Self::trusted(n, join, 0)
    }

    /// The diamond M₃: zero, three atoms, top.
    pub fn diamond() -> Self {
        Self::from_order(5, 0, |x, y| x == y || x == 0 || y == 4).expect("M3 is a lattice")
    }

    /// The pentagon N₅: 0 < a < b < 1 and 0 < c < 1.
    pub fn pentagon() -> Self {
        // 0, a=1, b=2, c=3, 1=4
        let lt = |x: usize, y: usize| matches!((x, y), (0, _) | (1, 2) | (_, 4));
        Self::from_order(5, 0, |x, y| x == y || (x != y && lt(x, y))).expect("N5 is a lattice")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.size);
        self.labels = Some(labels);
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.size + y] as usize
    }

    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.zero, |acc, x| self.join(acc, x))
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.below[y].contains(x)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    /// Elements below or equal to `y`.
    pub fn down_set(&self, y: usize) -> &FixedBitSet {
        &self.below[y]
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        let n = self.size;
        let table = self.meet.get_or_init(|| {
            let mut m = vec![0u32; n * n];
            for a in 0..n {
                for b in a..n {
                    let mut common = self.below[a].clone();
                    common.intersect_with(&self.below[b]);
                    let best = common
                        .ones()
                        .max_by_key(|&z| self.below[z].count_ones(..))
                        .expect("zero is a common lower bound");
                    m[a * n + b] = best as u32;
                    m[b * n + a] = best as u32;
                }
            }
            m
        });
        table[x * n + y] as usize
    }

    /// Meet of a family; the empty meet is the top.
    pub fn meet_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// Elements covered by `y`.
    pub fn lower_covers(&self, y: usize) -> Vec<usize> {
        (0..self.size)
            .filter(|&x| self.lt(x, y) && !(0..self.size).any(|z| self.lt(x, z) && self.lt(z, y)))
            .collect()
    }

    pub fn upper_covers(&self, x: usize) -> Vec<usize> {
        (0..self.size)
            .filter(|&y| self.lt(x, y) && !(0..self.size).any(|z| self.lt(x, z) && self.lt(z, y)))
            .collect()
    }

    /// All cover pairs `(x, y)` with `x` covered by `y`.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.size).flat_map(|y| self.lower_covers(y).into_iter().map(move |x| (x, y))).collect()
    }

    pub fn atoms(&self) -> Vec<usize> {
        self.upper_covers(self.zero)
    }

    /// Length of the longest chain from zero to `x`.
    pub fn height(&self, x: usize) -> usize {
        let mut h = vec![usize::MAX; self.size];
        self.height_rec(x, &mut h)
    }

    fn height_rec(&self, x: usize, memo: &mut [usize]) -> usize {
        if memo[x] != usize::MAX {
            return memo[x];
        }
        let h = self.lower_covers(x).into_iter().map(|y| self.height_rec(y, memo) + 1).max().unwrap_or(0);
        memo[x] = h;
        h
    }

    pub fn heights(&self) -> Vec<usize> {
        let mut memo = vec![usize::MAX; self.size];
        (0..self.size).map(|x| self.height_rec(x, &mut memo)).collect()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn join_table(&self) -> Vec<Vec<usize>> {
        (0..self.size).map(|x| (0..self.size).map(|y| self.join(x, y)).collect()).collect()
    }

    pub(crate) fn flat_join(&self) -> &[u32] {
        &self.join
    }

    pub fn to_record(&self) -> SemilatticeRecord {
        SemilatticeRecord { size: self.size, zero: self.zero, join: self.join_table(), labels: self.labels.clone() }
    }

    pub fn from_record(rec: &SemilatticeRecord) -> Result<Self> {
        if rec.join.len() != rec.size {
            return Err(Error::NotSquare { row: 0, len: rec.join.len(), expected: rec.size });
        }
        let s = Self::from_join_table(&rec.join, rec.zero)?;
        match &rec.labels {
            Some(l) if l.len() != rec.size => {
                Err(Error::IllFormed(format!("{} labels for {} elements", l.len(), rec.size)))
            }
            Some(l) => Ok(s.with_labels(l.clone())),
            None => Ok(s),
        }
    }

    /// Relabels elements: element `x` of `self` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.size;
        let mut join = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                join[perm[x] * n + perm[y]] = perm[self.join(x, y)] as u32;
            }
        }
        let mut s = Self::trusted(n, join, perm[self.zero]);
        if let Some(l) = &self.labels {
            let mut nl = vec![String::new(); n];
            for x in 0..n {
                nl[perm[x]] = l[x].clone();
            }
            s.labels = Some(nl);
        }
        s
    }

    /// The order dual is not a ⟨∨,0⟩-semilattice in general, but a finite one is,
    /// with meets as joins and the top as zero.
    pub fn dual(&self) -> Self {
        let n = self.size;
        let mut join = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                join[x * n + y] = self.meet(x, y) as u32;
            }
        }
        Self::trusted(n, join, self.top)
    }
}

impl PartialEq for Semilattice {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.zero == other.zero && self.join == other.join && self.labels == other.labels
    }
}

impl Eq for Semilattice {}

impl std::hash::Hash for Semilattice {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.size.hash(state);
        self.zero.hash(state);
        self.join.hash(state);
    }
}

impl fmt::Debug for Semilattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Semilattice(n={}, covers={:?})", self.size, self.cover_pairs())
    }
}

impl Serialize for Semilattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Semilattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = SemilatticeRecord::deserialize(d)?;
        Semilattice::from_record(&rec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_element_table() {
        let s = Semilattice::from_join_table(&[vec![0, 1], vec![1, 1]], 0).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(s.top(), 1);
        assert!(s.leq(0, 1));
        assert!(!s.leq(1, 0));
    }

    #[test]
    fn trivial_table() {
        let s = Semilattice::from_join_table(&[vec![0]], 0).unwrap();
        assert_eq!(s.size(), 1);
        assert_eq!(s.top(), 0);
    }

    #[test]
    fn zero_declared_as_top_is_rejected() {
        let err = Semilattice::from_join_table(&[vec![0, 0], vec![0, 1]], 0).unwrap_err();
        assert_eq!(err, Error::ZeroNotNeutral { x: 1 });
    }

    #[test]
    fn axiom_errors_name_witnesses() {
        assert_eq!(
            Semilattice::from_join_table(&[vec![1, 1], vec![1, 1]], 0).unwrap_err(),
            Error::NotIdempotent { x: 0 }
        );
        assert_eq!(
            Semilattice::from_join_table(&[vec![0, 1], vec![0, 1]], 0).unwrap_err(),
            Error::NotCommutative { x: 0, y: 1 }
        );
        // a v b = a, b v c = b, a v c = c is not associative
        let t = vec![vec![0, 0, 2], vec![0, 1, 1], vec![2, 1, 2]];
        assert!(matches!(Semilattice::from_join_table(&t, 0).unwrap_err(), Error::NotAssociative { .. }));
        assert!(matches!(
            Semilattice::from_join_table(&[vec![0, 1]], 0).unwrap_err(),
            Error::NotSquare { .. }
        ));
    }

    #[test]
    fn meets_of_diamond() {
        let m3 = Semilattice::diamond();
        assert_eq!(m3.meet(1, 2), 0);
        assert_eq!(m3.join(1, 2), 4);
        assert_eq!(m3.atoms(), vec![1, 2, 3]);
        assert_eq!(m3.meet_all([]), 4);
    }

    #[test]
    fn record_round_trip() {
        let s = Semilattice::boolean(2).with_labels(vec!["0".into(), "x".into(), "y".into(), "1".into()]);
        let json = serde_json::to_string(&s).unwrap();
        let back: Semilattice = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }
}

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{is_distributive, require_distributive, subsemilattice, Semilattice};

/// Largest host for which subobjects are enumerated (subsets containing zero).
pub const SUBOBJECT_HOST_CAP: usize = 20;

/// Distributive ⟨∨,0⟩-subsemilattices of a host, as sorted element lists,
/// ordered by size and then lexicographically; the host itself is last.
#[derive(Clone, Debug, Serialize)]
pub struct SubobjectPoset {
    #[serde(skip)]
    pub host: Arc<Semilattice>,
    pub subobjects: Vec<Vec<usize>>,
    /// height of each subobject in the inclusion order
    pub heights: Vec<usize>,
    pub length: usize,
}

impl SubobjectPoset {
    pub fn full(&self) -> usize {
        self.subobjects.len() - 1
    }

    /// Proper subobjects are `0..self.full()`.
    pub fn proper(&self) -> std::ops::Range<usize> {
        0..self.full()
    }

    pub fn contains(&self, small: usize, big: usize) -> bool {
        let b = &self.subobjects[big];
        self.subobjects[small].iter().all(|x| b.binary_search(x).is_ok())
    }

    pub fn index_of(&self, elems: &[usize]) -> Option<usize> {
        self.subobjects.iter().position(|s| s == elems)
    }

    /// Pairs `(x, y)` with `x` covered by `y` under inclusion.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.subobjects.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y
                    && self.contains(x, y)
                    && !(0..n).any(|z| z != x && z != y && self.contains(x, z) && self.contains(z, y))
                {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

pub fn subobject_poset(a: &Arc<Semilattice>) -> Result<SubobjectPoset> {
    require_distributive(a)?;
    let n = a.size();
    if n > SUBOBJECT_HOST_CAP {
        return Err(Error::SizeCapExceeded {
            what: "subobject enumeration".into(),
            needed: n as u128,
            cap: SUBOBJECT_HOST_CAP as u128,
        });
    }
    let others: Vec<usize> = a.elements().filter(|&x| x != a.zero()).collect();
    let mut subs: Vec<Vec<usize>> = Vec::new();
    for mask in 0u64..(1u64 << others.len()) {
        let mut set = vec![a.zero()];
        set.extend(others.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x));
        set.sort_unstable();
        let closed = set.iter().all(|&x| set.iter().all(|&y| set.binary_search(&a.join(x, y)).is_ok()));
        if !closed {
            continue;
        }
        let (sub, _) = subsemilattice(a, &set)?;
        if is_distributive(&sub) {
            subs.push(set);
        }
    }
    subs.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    let mut heights = vec![0usize; subs.len()];
    for i in 0..subs.len() {
        for j in 0..i {
            let contained = subs[j].len() < subs[i].len() && subs[j].iter().all(|x| subs[i].binary_search(x).is_ok());
            if contained {
                heights[i] = heights[i].max(heights[j] + 1);
            }
        }
    }
    let length = *heights.last().expect("the host is a subobject of itself");
    Ok(SubobjectPoset { host: a.clone(), subobjects: subs, heights, length })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poset(s: Semilattice) -> SubobjectPoset {
        subobject_poset(&Arc::new(s)).unwrap()
    }

    #[test]
    fn small_examples() {
        let p = poset(Semilattice::chain(1));
        assert_eq!((p.subobjects.len(), p.length), (1, 0));
        let p = poset(Semilattice::chain(2));
        assert_eq!(p.subobjects, vec![vec![0], vec![0, 1]]);
        assert_eq!(p.length, 1);
        let p = poset(Semilattice::chain(3));
        assert_eq!(p.subobjects, vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 1, 2]]);
        assert_eq!(p.length, 2);
    }

    #[test]
    fn length_strictly_increases() {
        for s in [Semilattice::boolean(2), Semilattice::chain(5), Semilattice::boolean(3)] {
            let p = poset(s);
            for (x, y) in p.covers() {
                assert!(p.heights[x] < p.heights[y]);
            }
        }
    }

    #[test]
    fn non_distributive_host_rejected() {
        assert!(matches!(subobject_poset(&Arc::new(Semilattice::pentagon())), Err(Error::NotDistributive { .. })));
    }
}

//! Isomorphism canonicalization by permutation search over order-compatible
//! relabelings, pruned by per-element invariants.

use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::{Morphism, Semilattice};
use crate::error::{Error, Result};

/// Default largest size accepted by [`canonical_form`].
pub const DEFAULT_CANON_CAP: usize = 24;

/// Invariant used to order elements; any isomorphism preserves it.
/// Height comes first, so sorting by invariant is a linear extension.
fn invariants(s: &Semilattice) -> Vec<(usize, usize, usize, usize, usize)> {
    let h = s.heights();
    s.elements()
        .map(|x| {
            let down = s.down_set(x).count_ones(..);
            let up = s.elements().filter(|&y| s.leq(x, y)).count();
            (h[x], down, up, s.lower_covers(x).len(), s.upper_covers(x).len())
        })
        .collect()
}

struct Search<'a> {
    s: &'a Semilattice,
    n: usize,
    /// elements sorted by invariant
    slots: Vec<Vec<usize>>,
    /// slot index for each position
    slot_of_pos: Vec<usize>,
    assigned: Vec<usize>,
    label_of: Vec<usize>,
    rows: Vec<u64>,
    best: Option<(Vec<u64>, Vec<usize>)>,
}

impl Search<'_> {
    fn run(&mut self, pos: usize, tight: bool) {
        if pos == self.n {
            let better = match &self.best {
                None => true,
                Some((b, _)) => self.rows < *b,
            };
            if better {
                self.best = Some((self.rows.clone(), self.assigned.clone()));
            }
            return;
        }
        let slot = self.slot_of_pos[pos];
        let candidates: Vec<usize> =
            self.slots[slot].iter().copied().filter(|&x| self.label_of[x] == usize::MAX).collect();
        for x in candidates {
            let mut row = 0u64;
            for (j, &y) in self.assigned.iter().enumerate() {
                if self.s.leq(y, x) {
                    row |= 1 << j;
                }
            }
            let mut next_tight = false;
            if tight {
                if let Some((b, _)) = &self.best {
                    if row > b[pos] {
                        continue;
                    }
                    next_tight = row == b[pos];
                }
            }
            self.rows.push(row);
            self.assigned.push(x);
            self.label_of[x] = pos;
            self.run(pos + 1, next_tight || (tight && self.best.is_none()));
            self.label_of[x] = usize::MAX;
            self.assigned.pop();
            self.rows.pop();
        }
    }
}

/// Canonical order code and the labeling realizing it (`perm[x]` = new label of `x`).
fn canonical_labeling(s: &Semilattice) -> (Vec<u64>, Vec<usize>) {
    let n = s.size();
    let inv = invariants(s);
    let mut order: Vec<usize> = s.elements().collect();
    order.sort_by_key(|&x| inv[x]);
    let mut slots: Vec<Vec<usize>> = Vec::new();
    let mut slot_of_pos = Vec::with_capacity(n);
    for (i, &x) in order.iter().enumerate() {
        if i == 0 || inv[order[i - 1]] != inv[x] {
            slots.push(Vec::new());
        }
        slots.last_mut().unwrap().push(x);
        slot_of_pos.push(slots.len() - 1);
    }
    let mut search = Search {
        s,
        n,
        slots,
        slot_of_pos,
        assigned: Vec::with_capacity(n),
        label_of: vec![usize::MAX; n],
        rows: Vec::with_capacity(n),
        best: None,
    };
    search.run(0, true);
    let (code, assigned) = search.best.expect("at least one labeling");
    let mut perm = vec![0; n];
    for (label, &x) in assigned.iter().enumerate() {
        perm[x] = label;
    }
    (code, perm)
}

/// Deterministic representative of the isomorphism class of `s`, and the
/// isomorphism from `s` onto it. Labels are dropped from the representative.
pub fn canonical_form(s: &Arc<Semilattice>) -> Result<(Arc<Semilattice>, Morphism)> {
    canonical_form_capped(s, DEFAULT_CANON_CAP)
}

pub fn canonical_form_capped(s: &Arc<Semilattice>, cap: usize) -> Result<(Arc<Semilattice>, Morphism)> {
    let cap = cap.min(64);
    if s.size() > cap {
        return Err(Error::SizeCapExceeded {
            what: "canonical form".into(),
            needed: s.size() as u128,
            cap: cap as u128,
        });
    }
    let (_, perm) = canonical_labeling(s);
    let mut c = s.permuted(&perm);
    c = Semilattice::trusted(c.size(), c.flat_join().to_vec(), c.zero());
    let c = Arc::new(c);
    let iso = Morphism::trusted(s.clone(), c.clone(), perm);
    Ok((c, iso))
}

/// Content hash of the canonical join table, used as a memo key.
pub fn canonical_key(canonical: &Semilattice) -> String {
    let mut h = Sha256::new();
    h.update((canonical.size() as u64).to_le_bytes());
    for &v in canonical.flat_join() {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}

pub fn is_isomorphic(a: &Semilattice, b: &Semilattice) -> bool {
    a.size() == b.size() && a.size() <= 64 && canonical_labeling(a).0 == canonical_labeling(b).0
}

/// All isomorphisms `a -> b` as element maps, up to `limit` of them.
pub fn isomorphisms(a: &Semilattice, b: &Semilattice, limit: usize) -> Vec<Vec<usize>> {
    let n = a.size();
    if n != b.size() {
        return Vec::new();
    }
    let ia = invariants(a);
    let ib = invariants(b);
    let mut order: Vec<usize> = a.elements().collect();
    order.sort_by_key(|&x| ia[x]);
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        i: usize,
        order: &[usize],
        a: &Semilattice,
        b: &Semilattice,
        ia: &[(usize, usize, usize, usize, usize)],
        ib: &[(usize, usize, usize, usize, usize)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == order.len() {
            out.push(map.clone());
            return;
        }
        let x = order[i];
        for y in b.elements() {
            if used[y] || ia[x] != ib[y] {
                continue;
            }
            let ok = order[..i].iter().all(|&z| a.leq(z, x) == b.leq(map[z], y) && a.leq(x, z) == b.leq(y, map[z]));
            if !ok {
                continue;
            }
            map[x] = y;
            used[y] = true;
            rec(i + 1, order, a, b, ia, ib, map, used, out, limit);
            used[y] = false;
            map[x] = usize::MAX;
        }
    }
    rec(0, &order, a, b, &ia, &ib, &mut map, &mut used, &mut out, limit);
    out
}

/// All automorphisms of `s` (order-preserving bijections are exactly the
/// semilattice automorphisms of a finite lattice).
pub fn automorphisms(s: &Arc<Semilattice>) -> Vec<Morphism> {
    isomorphisms(s, s, usize::MAX).into_iter().map(|m| Morphism::trusted(s.clone(), s.clone(), m)).collect()
}

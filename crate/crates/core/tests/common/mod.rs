//! Brute-force oracles shared by the integration tests. They only use table
//! data and never call into the colimit or cover engines.
#![allow(dead_code)]

use std::sync::Arc;

use boolcover::colimit::Diagram;
use boolcover::lattice::{Morphism, Semilattice};

pub fn arc(s: Semilattice) -> Arc<Semilattice> {
    Arc::new(s)
}

/// Largest `x` with `f(x) <= y`.
pub fn residual(f: &Morphism, y: usize) -> usize {
    let src = f.src();
    src.join_all(src.elements().filter(|&x| f.dst().leq(f.apply(x), y)))
}

/// The colimit of `d` through its dual: join-homomorphisms `colim d → 2`
/// are the tuples `(s_v)` with `s_v = f^♭(s_w)` for every arrow `f: v → w`,
/// and there is one for each element of the colimit. Tuples are enumerated
/// by their values on the maximal vertices.
pub fn colimit_by_duality(d: &Diagram) -> Semilattice {
    let n = d.vertices().len();
    let sinks = d.index().maximal();
    let above: Vec<usize> = (0..n).map(|v| *sinks.iter().find(|&&w| d.index().leq(v, w)).unwrap()).collect();
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let mut odo = vec![0usize; sinks.len()];
    'outer: loop {
        let mut s = vec![0usize; n];
        for (k, &w) in sinks.iter().enumerate() {
            s[w] = odo[k];
        }
        for v in 0..n {
            if above[v] != v {
                s[v] = residual(&d.arrow(v, above[v]).unwrap(), s[above[v]]);
            }
        }
        let closed = d.arrows().all(|((i, j), f)| s[i] == residual(f, s[j]));
        if closed {
            tuples.push(s);
        }
        for k in 0..sinks.len() {
            odo[k] += 1;
            if odo[k] < d.vertices()[sinks[k]].size() {
                continue 'outer;
            }
            odo[k] = 0;
        }
        break;
    }
    let leq = |a: &Vec<usize>, b: &Vec<usize>| (0..n).all(|v| d.vertices()[v].leq(a[v], b[v]));
    let zero = (0..tuples.len()).find(|&z| tuples.iter().all(|t| leq(&tuples[z], t))).unwrap();
    Semilattice::from_order(tuples.len(), zero, |x, y| leq(&tuples[x], &tuples[y])).unwrap()
}

/// Every ⟨∨,0⟩-homomorphism `src → dst`, by exhaustive search over maps.
pub fn all_homs(src: &Semilattice, dst: &Semilattice) -> Vec<Vec<usize>> {
    let n = src.size();
    let mut out = Vec::new();
    let mut map = vec![0usize; n];
    fn go(i: usize, map: &mut Vec<usize>, src: &Semilattice, dst: &Semilattice, out: &mut Vec<Vec<usize>>) {
        if i == map.len() {
            let ok = map[src.zero()] == dst.zero()
                && src.elements().all(|x| src.elements().all(|y| map[src.join(x, y)] == dst.join(map[x], map[y])));
            if ok {
                out.push(map.clone());
            }
            return;
        }
        for v in dst.elements() {
            map[i] = v;
            go(i + 1, map, src, dst, out);
        }
    }
    go(0, &mut map, src, dst, &mut out);
    out
}

/// Every lattice congruence of `s`, as class labels in restricted-growth
/// form, by enumerating all set partitions.
pub fn lattice_congruences_brute(s: &Semilattice) -> Vec<Vec<usize>> {
    let n = s.size();
    let mut out = Vec::new();
    let mut label = vec![0usize; n];
    fn go(i: usize, max: usize, label: &mut Vec<usize>, s: &Semilattice, out: &mut Vec<Vec<usize>>) {
        if i == label.len() {
            let ok = s.elements().all(|x| {
                s.elements().all(|y| {
                    label[x] != label[y]
                        || s.elements().all(|z| {
                            label[s.join(x, z)] == label[s.join(y, z)] && label[s.meet(x, z)] == label[s.meet(y, z)]
                        })
                })
            });
            if ok {
                out.push(label.clone());
            }
            return;
        }
        for c in 0..=max {
            label[i] = c;
            go(i + 1, max.max(c + 1), label, s, out);
        }
    }
    if n > 0 {
        go(1, 1, &mut label, s, &mut out);
    }
    out
}

/// Whether the quotient of `s` by the congruence `label` is atomistic,
/// computed on representatives.
pub fn quotient_is_atomistic(s: &Semilattice, label: &[usize]) -> bool {
    let leq = |x: usize, y: usize| label[s.join(x, y)] == label[y];
    let zero = label[s.zero()];
    let reps: Vec<usize> = {
        let mut seen = std::collections::BTreeMap::new();
        for x in s.elements() {
            seen.entry(label[x]).or_insert(x);
        }
        seen.into_values().collect()
    };
    let atoms: Vec<usize> = reps
        .iter()
        .copied()
        .filter(|&a| label[a] != zero && reps.iter().all(|&b| label[b] == zero || label[b] == label[a] || !leq(b, a)))
        .collect();
    reps.iter().all(|&x| {
        let j = atoms.iter().filter(|&&a| leq(a, x)).fold(s.zero(), |m, &a| s.join(m, a));
        label[j] == label[x]
    })
}

/// Injective homomorphisms by exhaustive search.
pub fn all_embeddings(src: &Semilattice, dst: &Semilattice) -> Vec<Vec<usize>> {
    all_homs(src, dst)
        .into_iter()
        .filter(|m| {
            let mut seen = m.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == m.len()
        })
        .collect()
}

use std::collections::HashMap;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use super::{normalize, ColimitResult, Diagram};
use crate::error::{Error, Result};
use crate::lattice::{join_congruence_generated, Morphism, Partition, Semilattice};

/// Largest free algebra materialized by [`free_join_semilattice`].
pub const FREE_TABLE_CAP: usize = 1 << 10;

/// Largest free algebra (number of subsets) explored by [`colimit_by_congruence`].
pub const FREE_ALGEBRA_CAP: usize = 1 << 22;

/// The free ⟨∨,0⟩-semilattice on `n` generators: subsets of `0..n` under union.
/// Element `i` is the subset with bitmask `i`, so generator `g` is `1 << g`.
pub fn free_join_semilattice(n: usize) -> Result<Semilattice> {
    free_join_semilattice_capped(n, FREE_TABLE_CAP)
}

pub fn free_join_semilattice_capped(n: usize, cap: usize) -> Result<Semilattice> {
    if n >= 64 || (1usize << n) > cap || n >= 16 {
        return Err(Error::SizeCapExceeded {
            what: "free semilattice".into(),
            needed: 1u128 << n.min(127),
            cap: cap as u128,
        });
    }
    Ok(Semilattice::boolean(n))
}

/// Least ⟨∨⟩-congruence of `s` containing `pairs`.
pub fn congruence_closure(s: &Semilattice, pairs: &[(usize, usize)]) -> Partition {
    join_congruence_generated(s, pairs)
}

/// Quotient of `s` by a ⟨∨⟩-congruence and the projection onto it.
pub fn quotient(s: &Arc<Semilattice>, p: &Partition) -> Result<(Arc<Semilattice>, Morphism)> {
    if p.len() != s.size() {
        return Err(Error::MapLength { len: p.len(), size: s.size() });
    }
    for x in s.elements() {
        for y in s.elements() {
            if x < y && p.same(x, y) {
                for z in s.elements() {
                    if !p.same(s.join(x, z), s.join(y, z)) {
                        return Err(Error::NotACongruence { x, y, z });
                    }
                }
            }
        }
    }
    let classes = p.classes();
    let m = classes.len();
    let mut join = vec![0u32; m * m];
    for a in 0..m {
        for b in 0..m {
            join[a * m + b] = p.class_of(s.join(classes[a][0], classes[b][0])) as u32;
        }
    }
    let q = Arc::new(Semilattice::trusted(m, join, p.class_of(s.zero())));
    let proj = Morphism::trusted(s.clone(), q.clone(), s.elements().map(|x| p.class_of(x)).collect());
    Ok((q, proj))
}

/// Colimit as the quotient of the free ⟨∨,0⟩-semilattice on the disjoint union
/// of the vertex carriers. Exponential in the total carrier size; used to
/// cross-check [`super::colimit`] on small diagrams.
pub fn colimit_by_congruence(d: &Diagram) -> Result<ColimitResult> {
    colimit_by_congruence_capped(d, FREE_ALGEBRA_CAP)
}

pub fn colimit_by_congruence_capped(d: &Diagram, cap: usize) -> Result<ColimitResult> {
    let verts = d.vertices();
    let mut base = Vec::with_capacity(verts.len());
    let mut n = 0;
    for v in verts {
        base.push(n);
        n += v.size();
    }
    if n >= 40 || (1usize << n) > cap {
        return Err(Error::SizeCapExceeded {
            what: "free algebra".into(),
            needed: 1u128 << n.min(127),
            cap: cap as u128,
        });
    }
    let size = 1usize << n;
    let single = |v: usize, x: usize| 1usize << (base[v] + x);
    let mut uf = UnionFind::<usize>::new(size);
    let mut work = Vec::new();
    let relate = |a: usize, b: usize, uf: &mut UnionFind<usize>, work: &mut Vec<(usize, usize)>| {
        if uf.union(a, b) {
            work.push((a, b));
        }
    };
    for (v, s) in verts.iter().enumerate() {
        relate(single(v, s.zero()), 0, &mut uf, &mut work);
        for x in s.elements() {
            for y in s.elements() {
                if x < y {
                    relate(single(v, x) | single(v, y), single(v, s.join(x, y)), &mut uf, &mut work);
                }
            }
        }
    }
    for ((i, j), f) in d.arrows() {
        for x in verts[i].elements() {
            relate(single(i, x), single(j, f.apply(x)), &mut uf, &mut work);
        }
    }
    // Compatibility with joins by generators implies compatibility with all joins.
    while let Some((a, b)) = work.pop() {
        for g in 0..n {
            let (x, y) = (a | 1 << g, b | 1 << g);
            if uf.union(x, y) {
                work.push((x, y));
            }
        }
    }
    let mut class_id: HashMap<usize, usize> = HashMap::new();
    let mut rep: Vec<usize> = Vec::new();
    let mut cls = vec![0usize; size];
    // smallest popcount first, so representatives are small generator sets
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by_key(|&m| (m.count_ones(), m));
    for &m in &order {
        let r = uf.find(m);
        let next = rep.len();
        let c = *class_id.entry(r).or_insert_with(|| {
            rep.push(m);
            next
        });
        cls[m] = c;
    }
    let k = rep.len();
    let mut join = vec![0u32; k * k];
    for a in 0..k {
        for b in 0..k {
            join[a * k + b] = cls[rep[a] | rep[b]] as u32;
        }
    }
    let apex = Arc::new(Semilattice::trusted(k, join, cls[0]));
    let legs = verts
        .iter()
        .enumerate()
        .map(|(v, s)| Morphism::trusted(s.clone(), apex.clone(), s.elements().map(|x| cls[single(v, x)]).collect()))
        .collect();
    let generator_map = rep
        .iter()
        .map(|&m| {
            (0..n)
                .filter(|&b| m >> b & 1 == 1)
                .map(|b| {
                    let v = base.partition_point(|&o| o <= b) - 1;
                    (v, b - base[v])
                })
                .collect()
        })
        .collect();
    normalize(d.clone(), apex, legs, generator_map)
}

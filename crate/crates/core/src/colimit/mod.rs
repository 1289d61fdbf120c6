//! Free ⟨∨,0⟩-semilattices, congruences, and colimits of finite
//! poset-indexed diagrams.

pub(crate) mod engine;
mod free;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    canonical_form, Morphism, Poset, PosetRecord, Semilattice, SemilatticeRecord, DEFAULT_CANON_CAP,
};
use engine::{Arrow, Carrier, Engine};

pub use free::{
    colimit_by_congruence, colimit_by_congruence_capped, congruence_closure, free_join_semilattice,
    free_join_semilattice_capped, quotient, FREE_ALGEBRA_CAP, FREE_TABLE_CAP,
};

/// Default bound on the number of colimit elements enumerated by [`colimit`].
pub const DEFAULT_COLIMIT_CAP: usize = 1 << 22;

/// A functor from a finite poset to finite semilattices.
///
/// Arrows are stored for every strictly comparable pair; identities are implicit.
#[derive(Clone)]
pub struct Diagram {
    index: Poset,
    vertices: Vec<Arc<Semilattice>>,
    arrows: BTreeMap<(usize, usize), Morphism>,
}

impl Diagram {
    /// Arrows must be given at least for the cover pairs of `index`; the rest
    /// are composed. Every given or composed arrow is checked for functoriality.
    pub fn new(
        index: Poset,
        vertices: Vec<Arc<Semilattice>>,
        arrows: impl IntoIterator<Item = ((usize, usize), Morphism)>,
    ) -> Result<Self> {
        let n = index.size();
        if vertices.len() != n {
            return Err(Error::MapLength { len: vertices.len(), size: n });
        }
        let mut given: BTreeMap<(usize, usize), Morphism> = BTreeMap::new();
        for ((i, j), f) in arrows {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { index: i.max(j), size: n });
            }
            if !index.lt(i, j) {
                return Err(Error::NotFunctorial(format!("arrow {i}->{j} is not a strict index relation")));
            }
            if f.src().as_ref() != vertices[i].as_ref() || f.dst().as_ref() != vertices[j].as_ref() {
                return Err(Error::NotFunctorial(format!("arrow {i}->{j} has the wrong endpoints")));
            }
            given.insert((i, j), f);
        }
        for &(i, j) in index.covers() {
            if !given.contains_key(&(i, j)) {
                return Err(Error::NotFunctorial(format!("missing arrow {i}->{j}")));
            }
        }
        // compose missing arrows, shortest gaps first
        let order = index.linear_extension();
        let pos: Vec<usize> = {
            let mut p = vec![0; n];
            for (k, &x) in order.iter().enumerate() {
                p[x] = k;
            }
            p
        };
        let mut pairs: Vec<(usize, usize)> =
            index.relations().into_iter().filter(|&(i, j)| i != j).collect();
        pairs.sort_by_key(|&(i, j)| (pos[j] - pos[i], pos[i]));
        for (i, j) in pairs {
            if given.contains_key(&(i, j)) {
                continue;
            }
            let &(_, k) = index
                .covers()
                .iter()
                .find(|&&(a, b)| a == i && index.leq(b, j))
                .expect("a chain of covers joins comparable points");
            let f = given[&(i, k)].then(&given[&(k, j)])?;
            given.insert((i, j), f);
        }
        let d = Diagram { index, vertices, arrows: given };
        d.check_functorial()?;
        Ok(d)
    }

    fn check_functorial(&self) -> Result<()> {
        for (&(i, j), f) in &self.arrows {
            for (&(j2, k), g) in self.arrows.range((j, 0)..(j + 1, 0)) {
                debug_assert_eq!(j2, j);
                let h = &self.arrows[&(i, k)];
                let composite: Vec<usize> = f.map().iter().map(|&x| g.apply(x)).collect();
                if composite != h.map() {
                    return Err(Error::NotFunctorial(format!("arrow {i}->{k} differs from {j}->{k} after {i}->{j}")));
                }
            }
        }
        Ok(())
    }

    pub fn index(&self) -> &Poset {
        &self.index
    }

    pub fn vertices(&self) -> &[Arc<Semilattice>] {
        &self.vertices
    }

    /// The arrow `i -> j`, or the identity when `i == j`.
    pub fn arrow(&self, i: usize, j: usize) -> Option<Morphism> {
        if i == j {
            return Some(Morphism::identity(self.vertices[i].clone()));
        }
        self.arrows.get(&(i, j)).cloned()
    }

    /// All non-identity arrows.
    pub fn arrows(&self) -> impl Iterator<Item = ((usize, usize), &Morphism)> {
        self.arrows.iter().map(|(&k, v)| (k, v))
    }

    /// A single-vertex diagram.
    pub fn single(s: Arc<Semilattice>) -> Self {
        Diagram { index: Poset::antichain(1), vertices: vec![s], arrows: BTreeMap::new() }
    }

    /// The span `b <- a -> c` as a diagram on `0 < 1, 0 < 2`.
    pub fn span(f: &Morphism, g: &Morphism) -> Result<Self> {
        if f.src().as_ref() != g.src().as_ref() {
            return Err(Error::NotComposable);
        }
        let index = Poset::new(3, &[(0, 1), (0, 2)])?;
        Diagram::new(
            index,
            vec![f.src().clone(), f.dst().clone(), g.dst().clone()],
            [((0, 1), f.clone()), ((0, 2), g.clone())],
        )
    }

    pub fn to_record(&self) -> DiagramRecord {
        DiagramRecord {
            index: self.index.to_record(),
            vertices: self.vertices.iter().enumerate().map(|(i, v)| (i.to_string(), v.to_record())).collect(),
            arrows: self.arrows.iter().map(|(&(i, j), f)| (format!("{i}->{j}"), f.map().to_vec())).collect(),
        }
    }

    pub fn from_record(r: &DiagramRecord) -> Result<Self> {
        let index = Poset::from_record(&r.index)?;
        let mut vertices = Vec::with_capacity(index.size());
        for i in 0..index.size() {
            let rec = r
                .vertices
                .get(&i.to_string())
                .ok_or_else(|| Error::IllFormed(format!("missing vertex {i}")))?;
            vertices.push(Arc::new(Semilattice::from_record(rec)?));
        }
        let mut arrows = Vec::new();
        for (key, map) in &r.arrows {
            let (a, b) = key.split_once("->").ok_or_else(|| Error::IllFormed(format!("bad arrow key {key}")))?;
            let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| Error::IllFormed(format!("bad arrow key {key}")));
            let (i, j) = (parse(a)?, parse(b)?);
            if i >= vertices.len() || j >= vertices.len() {
                return Err(Error::IndexOutOfRange { index: i.max(j), size: vertices.len() });
            }
            arrows.push(((i, j), Morphism::new(vertices[i].clone(), vertices[j].clone(), map.clone())?));
        }
        Diagram::new(index, vertices, arrows)
    }
}

impl std::fmt::Debug for Diagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Diagram({:?}, sizes {:?})", self.index, self.vertices.iter().map(|v| v.size()).collect::<Vec<_>>())
    }
}

/// JSON shape of a diagram: vertices keyed by point, arrows keyed `"i->j"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramRecord {
    pub index: PosetRecord,
    pub vertices: BTreeMap<String, SemilatticeRecord>,
    pub arrows: BTreeMap<String, Vec<usize>>,
}

/// A colimit with its legs. `generator_map[e]` lists `(vertex, element)`
/// pairs whose leg images join to `e`.
#[derive(Clone, Debug)]
pub struct ColimitResult {
    pub diagram: Diagram,
    pub apex: Arc<Semilattice>,
    pub legs: Vec<Morphism>,
    pub generator_map: Vec<Vec<(usize, usize)>>,
}

/// A compatible family of morphisms out of a diagram.
#[derive(Clone, Debug)]
pub struct Cocone {
    pub target: Arc<Semilattice>,
    pub components: Vec<Morphism>,
}

impl Cocone {
    /// Checks that every component leaves its vertex, lands in `target`, and
    /// commutes with the diagram arrows.
    pub fn check(&self, d: &Diagram) -> Result<()> {
        if self.components.len() != d.vertices().len() {
            return Err(Error::MapLength { len: self.components.len(), size: d.vertices().len() });
        }
        for (i, k) in self.components.iter().enumerate() {
            if k.src().as_ref() != d.vertices()[i].as_ref() || k.dst().as_ref() != self.target.as_ref() {
                return Err(Error::NotACocone { from: i, to: i });
            }
        }
        for ((i, j), f) in d.arrows() {
            let (ki, kj) = (&self.components[i], &self.components[j]);
            if d.vertices()[i].elements().any(|x| kj.apply(f.apply(x)) != ki.apply(x)) {
                return Err(Error::NotACocone { from: i, to: j });
            }
        }
        Ok(())
    }
}

/// Reorders the apex into canonical form when it is small enough.
pub(crate) fn normalize(
    diagram: Diagram,
    apex: Arc<Semilattice>,
    legs: Vec<Morphism>,
    generator_map: Vec<Vec<(usize, usize)>>,
) -> Result<ColimitResult> {
    if apex.size() > DEFAULT_CANON_CAP {
        return Ok(ColimitResult { diagram, apex, legs, generator_map });
    }
    let (canon, iso) = canonical_form(&apex)?;
    let legs = legs
        .iter()
        .map(|l| Morphism::trusted(l.src().clone(), canon.clone(), l.map().iter().map(|&x| iso.apply(x)).collect()))
        .collect();
    let mut gm = vec![Vec::new(); generator_map.len()];
    for (e, g) in generator_map.into_iter().enumerate() {
        gm[iso.apply(e)] = g;
    }
    Ok(ColimitResult { diagram, apex: canon, legs, generator_map: gm })
}

/// Colimit of a diagram, computed as the lattice of compatible families.
pub fn colimit(d: &Diagram) -> Result<ColimitResult> {
    colimit_capped(d, DEFAULT_COLIMIT_CAP)
}

pub fn colimit_capped(d: &Diagram, cap: usize) -> Result<ColimitResult> {
    let carriers: Vec<Carrier> = d.vertices().iter().map(|v| Carrier::Table(v.clone())).collect();
    let arrows: Vec<Arrow> = d
        .index()
        .covers()
        .iter()
        .map(|&(i, j)| {
            let f = d.arrow(i, j).expect("cover arrows exist");
            Arrow::table_table(i, j, &d.vertices()[i], &d.vertices()[j], f.map())
        })
        .collect();
    let engine = Engine::new(carriers, arrows);
    let lat = engine.enumerate(engine.generators(), cap, None)?;
    let n = lat.size;
    let etas: Vec<Vec<u64>> = (0..n).map(|e| lat.eta_key(&engine, lat.key(e))).collect();
    let by_eta: HashMap<&[u64], usize> = etas.iter().enumerate().map(|(e, w)| (w.as_slice(), e)).collect();
    let mut join = vec![0u32; n * n];
    let mut buf = vec![0u64; etas.first().map_or(1, |w| w.len())];
    for a in 0..n {
        for b in 0..n {
            for (o, (x, y)) in buf.iter_mut().zip(etas[a].iter().zip(&etas[b])) {
                *o = x | y;
            }
            join[a * n + b] = by_eta[buf.as_slice()] as u32;
        }
    }
    let apex = Arc::new(Semilattice::trusted(n, join, 0));
    let legs: Vec<Morphism> = d
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, s)| {
            let map = s.elements().map(|x| lat.id_of(&engine, &engine.leg_table(v, x)).expect("legs are closed")).collect();
            Morphism::trusted(s.clone(), apex.clone(), map)
        })
        .collect();
    let generator_map = (0..n)
        .map(|e| {
            let fam = engine.expand(lat.key(e));
            (0..engine.num_vertices())
                .map(|v| (v, engine.table_value(&fam, v)))
                .filter(|&(v, x)| x != d.vertices()[v].zero())
                .collect()
        })
        .collect();
    normalize(d.clone(), apex, legs, generator_map)
}

/// The unique morphism `h` out of the apex with `h ∘ leg_i = k_i`.
pub fn factor_through(c: &ColimitResult, k: &Cocone) -> Result<Morphism> {
    k.check(&c.diagram)?;
    let t = &k.target;
    let map: Vec<usize> = c
        .generator_map
        .iter()
        .map(|gens| t.join_all(gens.iter().map(|&(v, x)| k.components[v].apply(x))))
        .collect();
    for (v, leg) in c.legs.iter().enumerate() {
        for x in leg.src().elements() {
            if map[leg.apply(x)] != k.components[v].apply(x) {
                return Err(Error::Inconsistent(format!("generator ({v}, {x}) has two images")));
            }
        }
    }
    Morphism::new(c.apex.clone(), t.clone(), map).map_err(|e| Error::Inconsistent(e.to_string()))
}

/// Pushout of two embeddings with a common source.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub apex: Arc<Semilattice>,
    /// from the target of `phi`
    pub leg1: Morphism,
    /// from the target of `eps0`
    pub leg2: Morphism,
}

/// Amalgamates `phi: A0 -> A1` and `eps0: A0 -> B0` along their common source.
pub fn pushout_amalgamate(phi: &Morphism, eps0: &Morphism) -> Result<Pushout> {
    if !phi.is_embedding() || !eps0.is_embedding() {
        return Err(Error::NotEmbedding);
    }
    let d = Diagram::span(phi, eps0)?;
    let c = colimit(&d)?;
    let (leg1, leg2) = (c.legs[1].clone(), c.legs[2].clone());
    if !leg1.is_embedding() || !leg2.is_embedding() {
        return Err(Error::Internal("pushout legs along embeddings must be embeddings".into()));
    }
    Ok(Pushout { apex: c.apex, leg1, leg2 })
}

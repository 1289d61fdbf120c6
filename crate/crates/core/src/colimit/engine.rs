//! Colimits of finite semilattice diagrams as lattices of compatible families.
//!
//! A family assigns to every vertex `v` an element `c_v`; it is *closed* when
//! `c_v = f^♭(c_w)` for every arrow `f: v -> w`, where `f^♭(y)` is the largest
//! `x` with `f(x) <= y`. Closed families ordered componentwise form a lattice
//! isomorphic to the colimit: a family is the set of generators `(v, x)` with
//! `x <= c_v`, i.e. a closed set of the presentation on the disjoint union of
//! the vertex carriers. The leg of `v` sends `x` to the least closed family
//! with `c_v >= x`.
//!
//! Vertices are either explicit join tables or implicit powersets (bitsets of
//! a fixed width), so Boolean vertices with many atoms are never materialized.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::Semilattice;

#[derive(Clone)]
pub(crate) enum Carrier {
    Table(Arc<Semilattice>),
    /// Powerset of `k` atoms.
    Power(usize),
}

impl Carrier {
    fn words(&self) -> usize {
        match self {
            Carrier::Table(_) => 1,
            Carrier::Power(k) => words_for(*k),
        }
    }
}

pub(crate) fn words_for(k: usize) -> usize {
    k.div_ceil(64).max(1)
}

/// Join-homomorphism attached to an arrow, by carrier pair.
#[derive(Clone)]
pub(crate) enum ArrowMap {
    /// element map, plus residual indexed by target element
    TableTable { map: Vec<u32>, residual: Vec<u32> },
    /// image of every source element as target words; `irr` lists the
    /// join-irreducible sources, which suffice for the residual
    TablePower { img: Vec<Vec<u64>>, irr: Vec<u32> },
    /// image of every source atom as target words
    PowerPower { img: Vec<Vec<u64>> },
}

#[derive(Clone)]
pub(crate) struct Arrow {
    pub src: usize,
    pub dst: usize,
    pub map: ArrowMap,
}

impl Arrow {
    pub fn table_table(src: usize, dst: usize, from: &Semilattice, to: &Semilattice, map: &[usize]) -> Self {
        let residual = to
            .elements()
            .map(|y| from.join_all(from.elements().filter(|&x| to.leq(map[x], y))) as u32)
            .collect();
        Arrow {
            src,
            dst,
            map: ArrowMap::TableTable { map: map.iter().map(|&x| x as u32).collect(), residual },
        }
    }

    pub fn table_power(src: usize, dst: usize, from: &Semilattice, img: Vec<Vec<u64>>) -> Self {
        let irr = crate::lattice::join_irreducibles(from).into_iter().map(|x| x as u32).collect();
        Arrow { src, dst, map: ArrowMap::TablePower { img, irr } }
    }

    pub fn power_power(src: usize, dst: usize, img: Vec<Vec<u64>>) -> Self {
        Arrow { src, dst, map: ArrowMap::PowerPower { img } }
    }
}

pub(crate) type Family = Vec<u64>;

/// Reusable buffers for [`Engine::close`].
#[derive(Default)]
pub(crate) struct Scratch {
    queued: Vec<bool>,
    stack: Vec<usize>,
    buf: Vec<u64>,
}

/// A diagram prepared for closure computations.
pub(crate) struct Engine {
    carriers: Vec<Carrier>,
    offsets: Vec<usize>,
    width: usize,
    arrows: Vec<Arrow>,
    out_of: Vec<Vec<usize>>,
    into: Vec<Vec<usize>>,
    sinks: Vec<usize>,
    key_width: usize,
}

#[inline]
fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

impl Engine {
    /// `arrows` must generate the diagram: closedness along them implies
    /// closedness along every composite (true for the cover arrows of a functor).
    pub fn new(carriers: Vec<Carrier>, arrows: Vec<Arrow>) -> Self {
        let mut offsets = Vec::with_capacity(carriers.len());
        let mut width = 0;
        for c in &carriers {
            offsets.push(width);
            width += c.words();
        }
        let n = carriers.len();
        let mut out_of = vec![Vec::new(); n];
        let mut into = vec![Vec::new(); n];
        for (i, a) in arrows.iter().enumerate() {
            out_of[a.src].push(i);
            into[a.dst].push(i);
        }
        let sinks: Vec<usize> = (0..n).filter(|&v| out_of[v].is_empty()).collect();
        let key_width = sinks.iter().map(|&s| carriers[s].words()).sum();
        Engine { carriers, offsets, width, arrows, out_of, into, sinks, key_width }
    }

    pub fn num_vertices(&self) -> usize {
        self.carriers.len()
    }

    fn slot<'a>(&self, fam: &'a [u64], v: usize) -> &'a [u64] {
        &fam[self.offsets[v]..self.offsets[v] + self.carriers[v].words()]
    }

    /// Value of a table vertex.
    pub fn table_value(&self, fam: &[u64], v: usize) -> usize {
        fam[self.offsets[v]] as usize
    }

    pub fn zero_family(&self) -> Family {
        let mut f = vec![0u64; self.width];
        for (v, c) in self.carriers.iter().enumerate() {
            if let Carrier::Table(s) = c {
                f[self.offsets[v]] = s.zero() as u64;
            }
        }
        f
    }

    /// Joins `value` into vertex `v`; returns whether anything changed.
    fn join_into(&self, fam: &mut [u64], v: usize, value: &[u64]) -> bool {
        let off = self.offsets[v];
        match &self.carriers[v] {
            Carrier::Table(s) => {
                let cur = fam[off] as usize;
                let j = s.join(cur, value[0] as usize);
                if j != cur {
                    fam[off] = j as u64;
                    true
                } else {
                    false
                }
            }
            Carrier::Power(_) => {
                let mut changed = false;
                for (w, &x) in fam[off..off + value.len()].iter_mut().zip(value) {
                    let nw = *w | x;
                    if nw != *w {
                        *w = nw;
                        changed = true;
                    }
                }
                changed
            }
        }
    }

    fn forward(&self, a: &Arrow, fam: &[u64], out: &mut Vec<u64>) {
        out.clear();
        let src = self.slot(fam, a.src);
        match &a.map {
            ArrowMap::TableTable { map, .. } => out.push(map[src[0] as usize] as u64),
            ArrowMap::TablePower { img, .. } => out.extend_from_slice(&img[src[0] as usize]),
            ArrowMap::PowerPower { img } => {
                out.resize(self.carriers[a.dst].words(), 0);
                for_each_bit(src, |i| {
                    for (o, x) in out.iter_mut().zip(&img[i]) {
                        *o |= x;
                    }
                });
            }
        }
    }

    fn residual(&self, a: &Arrow, fam: &[u64], out: &mut Vec<u64>) {
        out.clear();
        let dst = self.slot(fam, a.dst);
        match &a.map {
            ArrowMap::TableTable { residual, .. } => out.push(residual[dst[0] as usize] as u64),
            ArrowMap::TablePower { img, irr } => {
                let Carrier::Table(s) = &self.carriers[a.src] else { unreachable!() };
                let mut acc = s.zero();
                for &x in irr {
                    if subset(&img[x as usize], dst) {
                        acc = s.join(acc, x as usize);
                    }
                }
                out.push(acc as u64);
            }
            ArrowMap::PowerPower { img } => {
                out.resize(self.carriers[a.src].words(), 0);
                for (i, im) in img.iter().enumerate() {
                    if subset(im, dst) {
                        out[i / 64] |= 1 << (i % 64);
                    }
                }
            }
        }
    }

    /// Raises `fam` to the least closed family above it. `dirty` lists the
    /// vertices whose values may violate closedness.
    pub fn close(&self, fam: &mut [u64], dirty: impl IntoIterator<Item = usize>) {
        self.close_with(fam, dirty, &mut Scratch::default());
    }

    fn close_with(&self, fam: &mut [u64], dirty: impl IntoIterator<Item = usize>, scratch: &mut Scratch) {
        let Scratch { queued, stack, buf } = scratch;
        queued.clear();
        queued.resize(self.carriers.len(), false);
        stack.clear();
        for v in dirty {
            if !queued[v] {
                queued[v] = true;
                stack.push(v);
            }
        }
        while let Some(v) = stack.pop() {
            queued[v] = false;
            for &ai in &self.out_of[v] {
                let a = &self.arrows[ai];
                self.forward(a, fam, buf);
                if self.join_into(fam, a.dst, buf) && !queued[a.dst] {
                    queued[a.dst] = true;
                    stack.push(a.dst);
                }
            }
            for &ai in &self.into[v] {
                let a = &self.arrows[ai];
                self.residual(a, fam, buf);
                if self.join_into(fam, a.src, buf) && !queued[a.src] {
                    queued[a.src] = true;
                    stack.push(a.src);
                }
            }
        }
    }

    pub fn close_all(&self, fam: &mut [u64]) {
        self.close(fam, 0..self.carriers.len());
    }

    /// Least closed family with `c_v >= x` (a table vertex).
    pub fn leg_table(&self, v: usize, x: usize) -> Family {
        let mut f = self.zero_family();
        f[self.offsets[v]] = x as u64;
        self.close_all(&mut f);
        f
    }

    /// Least closed family containing atom `i` at power vertex `v`.
    pub fn leg_atom(&self, v: usize, i: usize) -> Family {
        let mut f = self.zero_family();
        f[self.offsets[v] + i / 64] |= 1 << (i % 64);
        self.close_all(&mut f);
        f
    }

    pub fn key_of(&self, fam: &[u64]) -> Vec<u64> {
        let mut k = Vec::with_capacity(self.key_width);
        for &s in &self.sinks {
            k.extend_from_slice(self.slot(fam, s));
        }
        k
    }

    /// Closed family with the given sink projection.
    pub fn expand(&self, key: &[u64]) -> Family {
        let mut f = self.zero_family();
        let mut at = 0;
        for &s in &self.sinks {
            let w = self.carriers[s].words();
            let off = self.offsets[s];
            f[off..off + w].copy_from_slice(&key[at..at + w]);
            at += w;
        }
        self.close_all(&mut f);
        f
    }

    /// Componentwise order of closed families, read on sink projections.
    pub fn key_leq(&self, a: &[u64], b: &[u64]) -> bool {
        let mut at = 0;
        for &s in &self.sinks {
            match &self.carriers[s] {
                Carrier::Table(t) => {
                    if !t.leq(a[at] as usize, b[at] as usize) {
                        return false;
                    }
                    at += 1;
                }
                Carrier::Power(k) => {
                    let w = words_for(*k);
                    if !subset(&a[at..at + w], &b[at..at + w]) {
                        return false;
                    }
                    at += w;
                }
            }
        }
        true
    }

    /// `f := closure(f ∨ b)` for closed `f` and `b`. The pointwise join of
    /// closed families is already closed along forward maps, so only vertices
    /// that changed need revisiting.
    fn join_with(&self, f: &mut [u64], b: &[u64], dirty: &mut Vec<usize>, scratch: &mut Scratch) {
        dirty.clear();
        for v in 0..self.carriers.len() {
            if self.join_into(f, v, self.slot(b, v)) {
                dirty.push(v);
            }
        }
        self.close_with(f, dirty.iter().copied(), scratch);
    }

    /// Generators of the colimit: legs of the join-irreducibles of table
    /// vertices and of the atoms of power vertices, in vertex order. Legs equal
    /// to zero are dropped; duplicates are kept so callers can check that their
    /// images agree.
    pub fn generators(&self) -> Vec<Generator> {
        let mut zero = self.zero_family();
        self.close_all(&mut zero);
        let zkey = self.key_of(&zero);
        let mut out = Vec::new();
        for (v, c) in self.carriers.iter().enumerate() {
            let items: Vec<(usize, Family)> = match c {
                Carrier::Table(s) => crate::lattice::join_irreducibles(s)
                    .into_iter()
                    .map(|x| (x, self.leg_table(v, x)))
                    .collect(),
                Carrier::Power(k) => (0..*k).map(|i| (i, self.leg_atom(v, i))).collect(),
            };
            for (item, fam) in items {
                let key = self.key_of(&fam);
                if key != zkey {
                    out.push(Generator { vertex: v, item, key, fam });
                }
            }
        }
        out
    }

    /// Enumerates every closed family reachable from zero by joining generators.
    pub fn enumerate(&self, gens: Vec<Generator>, cap: usize, hom: Option<&GeneratorHom>) -> Result<FamilyLattice> {
        let gen_keys: Vec<Vec<u64>> = gens.iter().map(|g| g.key.clone()).collect();
        let mut zero = self.zero_family();
        self.close_all(&mut zero);
        let kw = self.key_width;
        let mut keys: Vec<u64> = Vec::new();
        let mut index: HashMap<Vec<u64>, u32> = HashMap::new();
        let mut hom_values: Vec<u32> = Vec::new();
        let hom_value = |key: &[u64]| -> u32 {
            let h = hom.expect("only called with a hom");
            let mut acc = h.target.zero();
            for (gk, &gv) in gen_keys.iter().zip(&h.values) {
                if self.key_leq(gk, key) {
                    acc = h.target.join(acc, gv);
                }
            }
            acc as u32
        };
        let zkey = self.key_of(&zero);
        keys.extend_from_slice(&zkey);
        if hom.is_some() {
            hom_values.push(hom_value(&zkey));
        }
        index.insert(zkey, 0);
        let mut meet_irreducible = Vec::new();
        let mut next = 0usize;
        let mut succ: Vec<u32> = Vec::new();
        let mut scratch = Scratch::default();
        let mut dirty = Vec::new();
        let mut w = vec![0u64; self.width];
        let mut wkey = Vec::with_capacity(kw);
        while next < index.len() {
            let u = next;
            next += 1;
            let ukey: Vec<u64> = keys[u * kw..(u + 1) * kw].to_vec();
            let ufam = self.expand(&ukey);
            succ.clear();
            for (gi, g) in gens.iter().enumerate() {
                if self.key_leq(&gen_keys[gi], &ukey) {
                    continue;
                }
                w.copy_from_slice(&ufam);
                self.join_with(&mut w, &g.fam, &mut dirty, &mut scratch);
                wkey.clear();
                for &s in &self.sinks {
                    wkey.extend_from_slice(self.slot(&w, s));
                }
                let id = match index.get(wkey.as_slice()) {
                    Some(&id) => id,
                    None => {
                        let id = index.len() as u32;
                        if index.len() >= cap {
                            return Err(Error::SizeCapExceeded {
                                what: "colimit elements".into(),
                                needed: index.len() as u128 + 1,
                                cap: cap as u128,
                            });
                        }
                        keys.extend_from_slice(&wkey);
                        if hom.is_some() {
                            hom_values.push(hom_value(&wkey));
                        }
                        index.insert(wkey.clone(), id);
                        id
                    }
                };
                if let Some(h) = hom {
                    let lhs = hom_values[id as usize] as usize;
                    let rhs = h.target.join(hom_values[u] as usize, h.values[gi]);
                    if lhs != rhs {
                        return Err(Error::Inconsistent(format!(
                            "induced map is not join-preserving at element {u} and generator {gi}"
                        )));
                    }
                }
                succ.push(id);
            }
            // unique upper cover <=> meet-irreducible
            if !succ.is_empty() {
                let key = |i: u32| &keys[i as usize * kw..(i as usize + 1) * kw];
                let mut m = succ[0];
                for &s in &succ[1..] {
                    if s != m && self.key_leq(key(s), key(m)) {
                        m = s;
                    }
                }
                if succ.iter().all(|&s| self.key_leq(key(m), key(s))) {
                    meet_irreducible.push(u as u32);
                }
            }
        }
        let size = index.len();
        Ok(FamilyLattice {
            key_width: kw,
            keys,
            index,
            size,
            meet_irreducible,
            hom_values: hom.map(|_| hom_values),
        })
    }
}

/// A generator of the colimit: the leg image of `item` (an element of a
/// table vertex or an atom of a power vertex) at `vertex`.
pub(crate) struct Generator {
    pub vertex: usize,
    pub item: usize,
    pub key: Vec<u64>,
    pub fam: Family,
}

/// Images of the generators (in the order passed to [`Engine::enumerate`]) in a target
/// table; enumeration checks that they induce a join-homomorphism.
pub(crate) struct GeneratorHom<'a> {
    pub target: &'a Semilattice,
    pub values: Vec<usize>,
}

/// The enumerated colimit, stored by sink projections.
pub(crate) struct FamilyLattice {
    pub key_width: usize,
    keys: Vec<u64>,
    index: HashMap<Vec<u64>, u32>,
    pub size: usize,
    pub meet_irreducible: Vec<u32>,
    pub hom_values: Option<Vec<u32>>,
}

impl FamilyLattice {
    pub fn key(&self, i: usize) -> &[u64] {
        &self.keys[i * self.key_width..(i + 1) * self.key_width]
    }

    pub fn id_of_key(&self, key: &[u64]) -> Option<usize> {
        self.index.get(key).map(|&i| i as usize)
    }

    pub fn id_of(&self, engine: &Engine, fam: &[u64]) -> Option<usize> {
        self.index.get(&engine.key_of(fam)).map(|&i| i as usize)
    }

    /// `eta(x) = { m in M : x !<= m }` as words over the meet-irreducibles.
    pub fn eta(&self, engine: &Engine, fam: &[u64]) -> Vec<u64> {
        let key = engine.key_of(fam);
        self.eta_key(engine, &key)
    }

    pub fn eta_key(&self, engine: &Engine, key: &[u64]) -> Vec<u64> {
        let k = self.meet_irreducible.len();
        let mut out = vec![0u64; words_for(k)];
        for (t, &m) in self.meet_irreducible.iter().enumerate() {
            if !engine.key_leq(key, self.key(m as usize)) {
                out[t / 64] |= 1 << (t % 64);
            }
        }
        out
    }
}

pub(crate) fn for_each_bit(words: &[u64], mut f: impl FnMut(usize)) {
    for (wi, &w) in words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let b = w.trailing_zeros() as usize;
            f(wi * 64 + b);
            w &= w - 1;
        }
    }
}

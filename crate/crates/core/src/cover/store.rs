use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use parking_lot::RwLock;

use super::subobjects::{subobject_poset, SubobjectPoset};
use super::{from_words, full, BoolMap, CoverEntry, CoverEntryRecord, PhiObject, PhiStar, PHI_STAR_TABLE_CAP};
use crate::colimit::engine::{Arrow, Carrier, Engine, GeneratorHom};
use crate::colimit::{Diagram, DEFAULT_COLIMIT_CAP};
use crate::error::{Error, Result};
use crate::lattice::{
    canonical_form, canonical_key, require_distributive, subsemilattice, Morphism, Poset, Semilattice,
};

/// Environment variable naming a directory of cached entries.
pub const CACHE_DIR_ENV: &str = "BOOLCOVER_CACHE_DIR";

/// Atom permutations induced by automorphisms, keyed by entry and element map.
type AutMemo = HashMap<(String, Vec<usize>), Arc<Vec<usize>>>;

/// Memo of cover entries keyed by canonical form, with an optional JSON cache
/// directory. Readers run concurrently; insertion is exclusive.
pub struct CoverStore {
    entries: RwLock<HashMap<String, Arc<CoverEntry>>>,
    pub(super) auts: RwLock<AutMemo>,
    cache_dir: Option<PathBuf>,
    colimit_cap: usize,
}

impl Default for CoverStore {
    fn default() -> Self {
        Self::new()
    }
}

impl CoverStore {
    pub fn new() -> Self {
        CoverStore {
            entries: RwLock::new(HashMap::new()),
            auts: RwLock::new(HashMap::new()),
            cache_dir: None,
            colimit_cap: DEFAULT_COLIMIT_CAP,
        }
    }

    /// A store backed by `dir`, or by the directory named in
    /// [`CACHE_DIR_ENV`] when `dir` is `None`.
    pub fn with_cache_dir(dir: Option<&Path>) -> Self {
        let dir = dir.map(Path::to_path_buf).or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from));
        CoverStore { cache_dir: dir, ..Self::new() }
    }

    pub fn with_colimit_cap(mut self, cap: usize) -> Self {
        self.colimit_cap = cap;
        self
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    /// All entries, ordered by size and key.
    pub fn entries(&self) -> Vec<Arc<CoverEntry>> {
        let mut v: Vec<_> = self.entries.read().values().cloned().collect();
        v.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.key.cmp(&b.key)));
        v
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<Arc<CoverEntry>> {
        self.entries.read().get(key).cloned()
    }

    pub(super) fn require(&self, key: &str) -> Result<Arc<CoverEntry>> {
        self.get(key).ok_or_else(|| Error::MissingDependency(key.to_string()))
    }

    /// `Φ` of an arbitrary distributive presentation.
    pub fn phi_object(&self, a: &Arc<Semilattice>) -> Result<PhiObject> {
        require_distributive(a)?;
        let (c, iso) = canonical_form(a)?;
        Ok(PhiObject::new(self.canonical_entry(&c)?, iso))
    }

    /// The entry of a semilattice already in canonical form.
    pub fn canonical_entry(&self, c: &Arc<Semilattice>) -> Result<Arc<CoverEntry>> {
        let key = canonical_key(c);
        if let Some(e) = self.get(&key) {
            return Ok(e);
        }
        let entry = match self.load(&key)? {
            Some(e) => e,
            None => {
                let e = compute_entry(self, c, key.clone())?;
                self.save(&e)?;
                e
            }
        };
        let entry = Arc::new(entry);
        Ok(self.entries.write().entry(key).or_insert(entry).clone())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    fn load(&self, key: &str) -> Result<Option<CoverEntry>> {
        let Some(p) = self.path(key) else { return Ok(None) };
        if !p.exists() {
            return Ok(None);
        }
        let rec: CoverEntryRecord = serde_json::from_slice(&std::fs::read(&p)?)?;
        // dependencies must be present for the entry to act on morphisms
        for k in &rec.sub_keys {
            if self.get(k).is_none() {
                let dep = self.load(k)?.ok_or_else(|| Error::MissingDependency(k.clone()))?;
                self.entries.write().entry(k.clone()).or_insert(Arc::new(dep));
            }
        }
        Ok(Some(CoverEntry::from_record(&rec)?))
    }

    fn save(&self, e: &CoverEntry) -> Result<()> {
        let Some(p) = self.path(&e.key) else { return Ok(()) };
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = p.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_vec(&e.to_record())?)?;
        std::fs::rename(tmp, p)?;
        Ok(())
    }
}

/// Carrier of a vertex of `ρ_A`.
#[derive(Clone, Debug)]
pub enum RhoCarrier {
    /// a subobject `X`
    Table(Arc<Semilattice>),
    /// `Φ(X)`, a powerset
    Boolean { atoms: usize },
}

/// Vertex `(X, level)` of `ρ_A`.
#[derive(Clone, Debug)]
pub struct RhoVertex {
    pub subobject: usize,
    pub level: u8,
    pub carrier: RhoCarrier,
}

#[derive(Clone, Debug)]
pub enum RhoMap {
    /// `(X,0) → (Y,0)`, by positions
    Inclusion(Vec<usize>),
    /// `(X,0) → (X,1)`: `ε_X`
    Eps(Vec<FixedBitSet>),
    /// `(X,1) → (Y,1)`: `Φ(incl)`
    Phi(BoolMap),
}

#[derive(Clone, Debug)]
pub struct RhoArrow {
    pub src: usize,
    pub dst: usize,
    pub map: RhoMap,
}

/// The diagram `ρ_A` on its cover arrows. Vertex `i < n` is `(X_i, 0)`;
/// vertex `n + i` is `(X_i, 1)` for proper `X_i`.
#[derive(Clone, Debug)]
pub struct Rho {
    pub subobjects: SubobjectPoset,
    pub vertices: Vec<RhoVertex>,
    pub arrows: Vec<RhoArrow>,
    /// per proper subobject: canonical relabeling and entry
    sub_isos: Vec<Vec<usize>>,
    sub_entries: Vec<Arc<CoverEntry>>,
}

impl Rho {
    /// The diagram with explicit tables for every vertex; needs all `Φ(X)` small.
    pub fn to_diagram(&self) -> Result<Diagram> {
        let tables: Vec<Arc<Semilattice>> = self
            .vertices
            .iter()
            .map(|v| match &v.carrier {
                RhoCarrier::Table(s) => Ok(s.clone()),
                RhoCarrier::Boolean { atoms } => super::boolean_table(*atoms),
            })
            .collect::<Result<_>>()?;
        let n = self.vertices.len();
        let mut rel = Vec::new();
        let mut arrows = Vec::new();
        for a in &self.arrows {
            rel.push((a.src, a.dst));
            let (s, t) = (&tables[a.src], &tables[a.dst]);
            let map = match &a.map {
                RhoMap::Inclusion(m) => m.clone(),
                RhoMap::Eps(imgs) => imgs.iter().map(super::to_mask).collect(),
                RhoMap::Phi(f) => f.to_morphism()?.map().to_vec(),
            };
            arrows.push(((a.src, a.dst), Morphism::new(s.clone(), t.clone(), map)?));
        }
        Diagram::new(Poset::new(n, &rel)?, tables, arrows)
    }
}

/// Builds `ρ_A` for a distributive `a`, computing entries of its proper
/// subobjects as needed. Checks the naturality and functoriality squares the
/// diagram depends on.
pub fn build_rho(a: &Arc<Semilattice>, store: &CoverStore) -> Result<Rho> {
    let sp = subobject_poset(a)?;
    let n = sp.subobjects.len();
    let subs: Vec<Arc<Semilattice>> =
        sp.subobjects.iter().map(|s| subsemilattice(a, s).map(|(x, _)| x)).collect::<Result<_>>()?;
    let mut sub_isos = Vec::new();
    let mut sub_entries = Vec::new();
    for i in sp.proper() {
        let (c, iso) = canonical_form(&subs[i])?;
        sub_entries.push(store.canonical_entry(&c)?);
        sub_isos.push(iso.map().to_vec());
    }
    let mut vertices: Vec<RhoVertex> = (0..n)
        .map(|i| RhoVertex { subobject: i, level: 0, carrier: RhoCarrier::Table(subs[i].clone()) })
        .collect();
    for i in sp.proper() {
        vertices.push(RhoVertex { subobject: i, level: 1, carrier: RhoCarrier::Boolean { atoms: sub_entries[i].atoms } });
    }
    let eps_of = |i: usize, pos: usize| -> &FixedBitSet { &sub_entries[i].eps[sub_isos[i][pos]] };
    // μ_X on an atom, as an element of A
    let mu_of = |i: usize, t: usize| -> usize {
        let c = sub_entries[i].mu[t];
        let pos = sub_isos[i].iter().position(|&x| x == c).expect("canonical relabelings are bijective");
        sp.subobjects[i][pos]
    };
    let position = |i: usize, x: usize| sp.subobjects[i].binary_search(&x).expect("element of the subobject");

    let covers = sp.covers();
    let mut phi_cover: HashMap<(usize, usize), BoolMap> = HashMap::new();
    let mut arrows = Vec::new();
    for &(x, y) in &covers {
        let incl: Vec<usize> = sp.subobjects[x].iter().map(|&e| position(y, e)).collect();
        arrows.push(RhoArrow { src: x, dst: y, map: RhoMap::Inclusion(incl.clone()) });
        if y != sp.full() {
            let f = Morphism::new(subs[x].clone(), subs[y].clone(), incl)?;
            let phi = store.phi_embedding(&f)?;
            // ε-square: Φ(incl) ∘ ε_X = ε_Y ∘ incl
            for (p, &e) in sp.subobjects[x].iter().enumerate() {
                if phi.apply(eps_of(x, p)) != *eps_of(y, position(y, e)) {
                    return Err(Error::NotFunctorial(format!("ε-square fails for subobjects {x} ⊂ {y} at {e}")));
                }
            }
            // μ-square: μ_Y ∘ Φ(incl) = incl ∘ μ_X
            for t in 0..phi.src_atoms {
                let lhs = a.join_all(phi.images[t].ones().map(|u| mu_of(y, u)));
                if lhs != mu_of(x, t) {
                    return Err(Error::NotFunctorial(format!("μ-square fails for subobjects {x} ⊂ {y} at atom {t}")));
                }
            }
            arrows.push(RhoArrow { src: n + x, dst: n + y, map: RhoMap::Phi(phi.clone()) });
            phi_cover.insert((x, y), phi);
        }
    }
    for i in sp.proper() {
        let imgs = (0..sp.subobjects[i].len()).map(|p| eps_of(i, p).clone()).collect();
        arrows.push(RhoArrow { src: i, dst: n + i, map: RhoMap::Eps(imgs) });
    }
    // functoriality along chains of covers: Φ(Y ⊂ Z) ∘ Φ(X ⊂ Y) = Φ(X ⊂ Z)
    for (&(x, y), f) in &phi_cover {
        for (&(y2, z), g) in &phi_cover {
            if y2 != y {
                continue;
            }
            let incl: Vec<usize> = sp.subobjects[x].iter().map(|&e| position(z, e)).collect();
            let direct = store.phi_embedding(&Morphism::new(subs[x].clone(), subs[z].clone(), incl)?)?;
            if f.then(g)? != direct {
                return Err(Error::NotFunctorial(format!("Φ fails to compose along {x} ⊂ {y} ⊂ {z}")));
            }
        }
    }
    arrows.sort_by_key(|a| (a.src, a.dst));
    Ok(Rho { subobjects: sp, vertices, arrows, sub_isos, sub_entries })
}

fn words(b: &FixedBitSet) -> Vec<u64> {
    super::to_words(b)
}

pub(super) fn compute_entry(store: &CoverStore, c: &Arc<Semilattice>, key: String) -> Result<CoverEntry> {
    let rho = build_rho(c, store)?;
    let sp = &rho.subobjects;
    let n = sp.subobjects.len();
    let full_v = sp.full();
    let carriers: Vec<Carrier> = rho
        .vertices
        .iter()
        .map(|v| match &v.carrier {
            RhoCarrier::Table(s) => Carrier::Table(s.clone()),
            RhoCarrier::Boolean { atoms } => Carrier::Power(*atoms),
        })
        .collect();
    let tables: Vec<Option<Arc<Semilattice>>> = rho
        .vertices
        .iter()
        .map(|v| match &v.carrier {
            RhoCarrier::Table(s) => Some(s.clone()),
            RhoCarrier::Boolean { .. } => None,
        })
        .collect();
    let arrows: Vec<Arrow> = rho
        .arrows
        .iter()
        .map(|a| match &a.map {
            RhoMap::Inclusion(m) => {
                Arrow::table_table(a.src, a.dst, tables[a.src].as_ref().unwrap(), tables[a.dst].as_ref().unwrap(), m)
            }
            RhoMap::Eps(imgs) => {
                Arrow::table_power(a.src, a.dst, tables[a.src].as_ref().unwrap(), imgs.iter().map(words).collect())
            }
            RhoMap::Phi(f) => Arrow::power_power(a.src, a.dst, f.images.iter().map(words).collect()),
        })
        .collect();
    let engine = Engine::new(carriers, arrows);

    // μ^A on generators: the cocone ⟨id_A, u ∘ μ_X⟩
    let gens = engine.generators();
    let values: Vec<usize> = gens
        .iter()
        .map(|g| {
            let v = &rho.vertices[g.vertex];
            let i = v.subobject;
            if v.level == 0 {
                sp.subobjects[i][g.item]
            } else {
                let m = rho.sub_entries[i].mu[g.item];
                let pos = rho.sub_isos[i].iter().position(|&x| x == m).unwrap();
                sp.subobjects[i][pos]
            }
        })
        .collect();
    let gen_count = {
        let mut keys: Vec<&Vec<u64>> = gens.iter().map(|g| &g.key).collect();
        keys.sort();
        keys.dedup();
        keys.len()
    };
    let gen_keys: Vec<Vec<u64>> = gens.iter().map(|g| g.key.clone()).collect();
    let hom = GeneratorHom { target: c, values: values.clone() };
    let lat = engine.enumerate(gens, store.colimit_cap, Some(&hom))?;
    let hom_values = lat.hom_values.as_ref().expect("requested");
    for (gk, &v) in gen_keys.iter().zip(&values) {
        let id = lat.id_of_key(gk).expect("generators are enumerated");
        if hom_values[id] as usize != v {
            return Err(Error::Inconsistent("the cocone ⟨id, u∘μ⟩ does not factor through Φ_*".into()));
        }
    }

    let k = lat.meet_irreducible.len();
    let eta_of = |fam: &[u64]| from_words(k, &lat.eta(&engine, fam));
    let eps: Vec<FixedBitSet> = c.elements().map(|x| eta_of(&engine.leg_table(full_v, x))).collect();
    let sub_legs: Vec<BoolMap> = sp
        .proper()
        .map(|i| BoolMap {
            src_atoms: rho.sub_entries[i].atoms,
            dst_atoms: k,
            images: (0..rho.sub_entries[i].atoms).map(|t| eta_of(&engine.leg_atom(n + i, t))).collect(),
        })
        .collect();
    // μ_A(t) = ⋀ { μ^A(g) : g generator, t ∈ η(g) }
    let gen_etas: Vec<FixedBitSet> = gen_keys.iter().map(|gk| from_words(k, &lat.eta_key(&engine, gk))).collect();
    let mu: Vec<usize> = (0..k)
        .map(|t| c.meet_all(gen_etas.iter().zip(&values).filter(|(e, _)| e.contains(t)).map(|(_, &v)| v)))
        .collect();

    let star = if lat.size <= PHI_STAR_TABLE_CAP {
        Some(explicit_star(c, &engine, &lat, &rho, k)?)
    } else {
        None
    };
    let entry = CoverEntry {
        key,
        object: c.clone(),
        subobjects: sp.subobjects.clone(),
        length: sp.length,
        sub_isos: rho.sub_isos.clone(),
        sub_keys: rho.sub_entries.iter().map(|e| e.key.clone()).collect(),
        phi_star_size: lat.size,
        generator_count: gen_count,
        atoms: k,
        eps,
        mu,
        sub_legs,
        star,
    };
    verify_entry(&entry, &rho)?;
    Ok(entry)
}

fn explicit_star(
    c: &Arc<Semilattice>,
    engine: &Engine,
    lat: &crate::colimit::engine::FamilyLattice,
    rho: &Rho,
    k: usize,
) -> Result<PhiStar> {
    let m = lat.size;
    let etas: Vec<Vec<u64>> = (0..m).map(|e| lat.eta_key(engine, lat.key(e))).collect();
    let by_eta: HashMap<&[u64], usize> = etas.iter().enumerate().map(|(e, w)| (w.as_slice(), e)).collect();
    let mut join = vec![0u32; m * m];
    for a in 0..m {
        for b in 0..m {
            let u: Vec<u64> = etas[a].iter().zip(&etas[b]).map(|(x, y)| x | y).collect();
            join[a * m + b] = by_eta[u.as_slice()] as u32;
        }
    }
    let table = Arc::new(Semilattice::from_flat(m, join, 0)?);
    let full_v = rho.subobjects.full();
    let n = rho.subobjects.subobjects.len();
    let id = |fam: &[u64]| lat.id_of(engine, fam).expect("legs are enumerated");
    let eps_upper = Morphism::new(c.clone(), table.clone(), c.elements().map(|x| id(&engine.leg_table(full_v, x))).collect())?;
    let hv = lat.hom_values.as_ref().expect("requested");
    let mu_upper = Morphism::new(table.clone(), c.clone(), hv.iter().map(|&v| v as usize).collect())?;
    let sub_legs = rho
        .subobjects
        .proper()
        .map(|i| (0..rho.sub_entries[i].atoms).map(|t| id(&engine.leg_atom(n + i, t))).collect())
        .collect();
    let eta = etas.iter().map(|w| from_words(k, w)).collect();
    Ok(PhiStar { table, eps_upper, mu_upper, sub_legs, eta })
}

fn verify_entry(e: &CoverEntry, rho: &Rho) -> Result<()> {
    let a = &e.object;
    let bad = |what: &str| Err(Error::Internal(format!("entry {}: {what}", &e.key[..12])));
    for x in a.elements() {
        for y in a.elements() {
            let mut u = e.eps[x].clone();
            u.union_with(&e.eps[y]);
            if u != e.eps[a.join(x, y)] {
                return bad("ε_A is not join-preserving");
            }
            if x < y && e.eps[x] == e.eps[y] {
                return bad("ε_A is not injective");
            }
        }
        if e.mu_of(&e.eps[x]) != x {
            return bad("μ_A ∘ ε_A ≠ id");
        }
    }
    if e.eps[a.zero()].count_ones(..) != 0 || e.eps[a.top()] != full(e.atoms) {
        return bad("ε_A does not preserve 0 and 1");
    }
    for (i, leg) in e.sub_legs.iter().enumerate() {
        if !leg.is_embedding() {
            return bad("Φ(incl) is not an embedding");
        }
        let sub = &rho.sub_entries[i];
        for (p, &x) in e.subobjects[i].iter().enumerate() {
            if leg.apply(&sub.eps[rho.sub_isos[i][p]]) != e.eps[x] {
                return bad("Φ(incl) ∘ ε_X ≠ ε_A ∘ incl");
            }
        }
        for t in 0..leg.src_atoms {
            let m = sub.mu[t];
            let pos = rho.sub_isos[i].iter().position(|&x| x == m).unwrap();
            if e.mu_of(&leg.images[t]) != e.subobjects[i][pos] {
                return bad("μ_A ∘ Φ(incl) ≠ incl ∘ μ_X");
            }
        }
    }
    if let Some(s) = &e.star {
        if a.elements().any(|x| s.mu_upper.apply(s.eps_upper.apply(x)) != x) {
            return bad("μ^A ∘ ε^A ≠ id");
        }
    }
    Ok(())
}

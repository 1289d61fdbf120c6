use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::corpus::{enumerate_semilattices, Corpus, CORPUS_CAP};
use crate::colimit::{colimit, factor_through, Cocone, ColimitResult, Diagram};
use crate::cover::{size_bound_report, trim_entry, trim_zero, trimmed_morphism, BoolMap, CoverStore};
use crate::error::{Error, Result};
use crate::gs::{atomistic_image_check, gs_checks, gs_morphism, surjective_lattice_images};
use crate::lattice::{automorphisms, homomorphisms, is_boolean, Morphism, Poset, Semilattice};
use crate::shelter::{exhaustive_shelter_samples, largest_extension, verify_shelter_laws};
use crate::simult::{
    build_counterexample, necess_check, search_simultaneous_with, ExhaustReason, NecessResult, SearchOptions,
    SearchOutcome, SQUARE_A, SQUARE_A1, SQUARE_A2, SQUARE_S,
};

pub const SUITES: [&str; 9] = [
    "retraction",
    "naturality",
    "functoriality",
    "shelter-laws",
    "colimit-universality",
    "gs",
    "counterexample",
    "size-bounds",
    "atomistic-image",
];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// overrides the suite's default size bound
    pub max_size: Option<usize>,
    /// members attempted by `retraction` beyond the exhaustive bound
    pub curated: Vec<Arc<Semilattice>>,
    /// morphisms taken per pair of objects where a suite samples
    pub sample: usize,
    /// also check the laws after cutting every `Φ(A)` down to `[b_A, 1]`
    pub trim_zero: bool,
    pub max_atoms: usize,
    pub work_limit: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { max_size: None, curated: Vec::new(), sample: 2, trim_zero: false, max_atoms: 6, work_limit: 100_000_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub case: String,
    pub message: String,
    pub witness: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
    pub wall_ms: u64,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.into(), cases: 0, violations: Vec::new(), notes: Vec::new(), wall_ms: 0 }
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, case: impl Into<String>, message: impl std::fmt::Display, witness: serde_json::Value) {
        self.violations.push(Violation { case: case.into(), message: message.to_string(), witness });
    }
}

/// The 2 × 3 grid, the distributive lattice of size 6 attempted by `retraction`.
pub fn curated_size_six() -> Vec<Arc<Semilattice>> {
    let grid = Semilattice::from_order(6, 0, |x, y| x / 3 <= y / 3 && x % 3 <= y % 3)
        .expect("a product of chains is a lattice")
        .with_labels((0..6).map(|x| format!("({},{})", x / 3, x % 3)).collect());
    vec![Arc::new(grid)]
}

pub fn embeddings(x: &Arc<Semilattice>, y: &Arc<Semilattice>, limit: usize) -> Vec<Morphism> {
    if x.size() > y.size() {
        return Vec::new();
    }
    homomorphisms(x, y, usize::MAX)
        .into_iter()
        .filter_map(|m| Morphism::new(x.clone(), y.clone(), m).ok())
        .filter(|f| f.is_embedding())
        .take(limit)
        .collect()
}

fn homs(x: &Arc<Semilattice>, y: &Arc<Semilattice>, limit: usize) -> Vec<Morphism> {
    homomorphisms(x, y, limit).into_iter().map(|m| Morphism::new(x.clone(), y.clone(), m).expect("enumerated homomorphism")).collect()
}

fn tag(s: &Semilattice, key: &str) -> String {
    format!("{}#{}", s.size(), &key[..10])
}

pub fn run_suite(name: &str, config: &SuiteConfig, store: &CoverStore) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut r = SuiteReport::new(name);
    let bound = |d: usize| config.max_size.unwrap_or(d);
    let corpus = |n: usize| enumerate_semilattices(n.min(CORPUS_CAP));
    match name {
        "retraction" => retraction(&mut r, &corpus(bound(5))?, config, store),
        "naturality" => naturality(&mut r, &corpus(bound(4) + 1)?, bound(4), config, store),
        "functoriality" => functoriality(&mut r, &corpus(bound(4))?, store),
        "shelter-laws" => shelter_laws(&mut r, &corpus(bound(5).max(6))?, bound(5))?,
        "colimit-universality" => colimit_universality(&mut r, &corpus(bound(4) + 1)?, bound(4), config)?,
        "gs" => gs_suite(&mut r, &corpus(bound(6))?, config),
        "counterexample" => counterexample(&mut r, config)?,
        "size-bounds" => size_bounds(&mut r, &corpus(bound(5))?, store),
        "atomistic-image" => atomistic_image(&mut r, &corpus(bound(7))?)?,
        _ => return Err(Error::UnknownSuite(name.into())),
    }
    r.wall_ms = start.elapsed().as_millis() as u64;
    Ok(r)
}

fn retraction(r: &mut SuiteReport, corpus: &Corpus, config: &SuiteConfig, store: &CoverStore) {
    let objects: Vec<Arc<Semilattice>> = corpus
        .members
        .iter()
        .filter(|m| m.flags.distributive)
        .map(|m| m.semilattice.clone())
        .chain(config.curated.iter().cloned())
        .collect();
    for s in objects {
        r.cases += 1;
        let case = format!("size {} {:?}", s.size(), (0..s.size()).map(|x| s.label(x)).collect::<Vec<_>>());
        let p = match store.phi_object(&s) {
            Ok(p) => p,
            Err(e) => {
                r.fail(case, format!("phi_object failed: {e}"), serde_json::json!({ "size": s.size() }));
                continue;
            }
        };
        let k = p.atoms();
        r.notes.push(format!("{case}: |Φ_*| = {}, atoms = {k}", p.entry.phi_star_size));
        if let Some(a) = s.elements().find(|&a| p.mu(p.eps(a)) != a) {
            r.fail(&case, "μ ∘ ε ≠ id", serde_json::json!({ "element": a }));
        }
        if p.eps(s.zero()).count_ones(..) != 0 || p.eps(s.top()).count_ones(..) != k {
            r.fail(&case, "ε does not preserve 0 and 1", serde_json::Value::Null);
        }
        'join: for a in s.elements() {
            for b in s.elements() {
                let mut u = p.eps(a).clone();
                u.union_with(p.eps(b));
                if u != *p.eps(s.join(a, b)) {
                    r.fail(&case, "ε does not preserve joins", serde_json::json!([a, b]));
                    break 'join;
                }
                if a < b && p.eps(a) == p.eps(b) {
                    r.fail(&case, "ε is not injective", serde_json::json!([a, b]));
                    break 'join;
                }
            }
        }
        if k <= 10 {
            match p.entry.phi_table() {
                Ok(t) if is_boolean(&t) => {}
                _ => r.fail(&case, "Φ(A) is not Boolean", serde_json::json!({ "atoms": k })),
            }
        }
    }
    if config.trim_zero {
        let t = trim_zero(store);
        r.notes.push(format!("trimmed {} of {} entries", t.trimmed, t.entries));
        for v in t.violations {
            r.fail("trim-zero", v, serde_json::Value::Null);
        }
    }
}

fn check_embedding(r: &mut SuiteReport, f: &Morphism, store: &CoverStore, trim: bool) {
    r.cases += 1;
    let case = format!("{:?}", f.map());
    if let Err(e) = store.phi_morphism(f) {
        r.fail(&case, e, serde_json::json!({ "src": f.src().to_record(), "dst": f.dst().to_record(), "map": f.map() }));
        return;
    }
    if trim {
        if let Err(e) = check_trimmed(f, store) {
            r.fail(format!("{case} trimmed"), e, serde_json::json!({ "map": f.map() }));
        }
    }
}

/// Squares and injectivity of `x ↦ Φ(f)(x) ∨ b_Y` between trimmed covers.
pub fn check_trimmed(f: &Morphism, store: &CoverStore) -> Result<()> {
    let phi = trimmed_morphism(f, store)?;
    let (px, py) = (store.phi_object(f.src())?, store.phi_object(f.dst())?);
    let (tx, ty) = (trim_entry(&px.entry), trim_entry(&py.entry));
    let inv_y = py.iso.inverse()?;
    for a in f.src().elements() {
        if phi.apply(&tx.eps[px.iso.apply(a)]) != ty.eps[py.iso.apply(f.apply(a))] {
            return Err(Error::Internal(format!("trimmed ε-square fails at {a}")));
        }
    }
    let inv_x = px.iso.inverse()?;
    for (t, im) in phi.images.iter().enumerate() {
        let mu_y = inv_y.apply(py.object().join_all(std::iter::empty()));
        let lhs = im.ones().fold(mu_y, |m, u| f.dst().join(m, inv_y.apply(ty.mu[u])));
        if lhs != f.apply(inv_x.apply(tx.mu[t])) {
            return Err(Error::Internal(format!("trimmed μ-square fails at atom {t}")));
        }
    }
    if !phi.is_embedding() {
        return Err(Error::Internal("trimmed Φ(f) is not an embedding".into()));
    }
    Ok(())
}

fn naturality(r: &mut SuiteReport, corpus: &Corpus, max: usize, config: &SuiteConfig, store: &CoverStore) {
    let dist: Vec<&Arc<Semilattice>> =
        corpus.members.iter().filter(|m| m.flags.distributive).map(|m| &m.semilattice).collect();
    for (i, x) in dist.iter().enumerate() {
        for (j, y) in dist.iter().enumerate() {
            if i == j || x.size() > y.size() {
                continue;
            }
            let limit = if y.size() <= max { usize::MAX } else { config.sample };
            for f in embeddings(x, y, limit) {
                check_embedding(r, &f, store, config.trim_zero);
            }
        }
    }
}

fn functoriality(r: &mut SuiteReport, corpus: &Corpus, store: &CoverStore) {
    let dist: Vec<&Arc<Semilattice>> =
        corpus.members.iter().filter(|m| m.flags.distributive).map(|m| &m.semilattice).collect();
    let mut phis: HashMap<(usize, usize), Vec<(Morphism, BoolMap)>> = HashMap::new();
    for (i, x) in dist.iter().enumerate() {
        for (j, y) in dist.iter().enumerate() {
            let list: Vec<Morphism> = if i == j { automorphisms(x) } else { embeddings(x, y, usize::MAX) };
            let mut out = Vec::new();
            for f in list {
                match store.phi_morphism(&f) {
                    Ok(p) => out.push((f, p)),
                    Err(e) => r.fail(format!("{:?}", f.map()), e, serde_json::Value::Null),
                }
            }
            phis.insert((i, j), out);
        }
    }
    for (i, _) in dist.iter().enumerate() {
        r.cases += 1;
        let id = phis[&(i, i)].iter().find(|(f, _)| f.map().iter().enumerate().all(|(a, &b)| a == b));
        match id {
            Some((_, p)) if *p == BoolMap::identity(p.src_atoms) => {}
            _ => r.fail(format!("identity of object {i}"), "Φ(id) ≠ id", serde_json::Value::Null),
        }
    }
    let n = dist.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for (f, pf) in &phis[&(i, j)] {
                    for (g, pg) in &phis[&(j, k)] {
                        r.cases += 1;
                        let gf = f.then(g).expect("composable");
                        let direct = match store.phi_morphism(&gf) {
                            Ok(p) => p,
                            Err(e) => {
                                r.fail(format!("{:?} then {:?}", f.map(), g.map()), e, serde_json::Value::Null);
                                continue;
                            }
                        };
                        if pf.then(pg).ok().as_ref() != Some(&direct) {
                            r.fail(
                                format!("{:?} then {:?}", f.map(), g.map()),
                                "Φ(g ∘ f) ≠ Φ(g) ∘ Φ(f)",
                                serde_json::json!({ "f": f.map(), "g": g.map() }),
                            );
                        }
                    }
                }
            }
        }
    }
}

fn shelter_laws(r: &mut SuiteReport, corpus: &Corpus, max: usize) -> Result<()> {
    let objects: Vec<Arc<Semilattice>> = corpus.up_to(max).map(|m| m.semilattice.clone()).collect();
    let laws = verify_shelter_laws(&exhaustive_shelter_samples(&objects, usize::MAX));
    r.cases += laws.checked;
    for v in laws.violations {
        r.fail("shelter law", v, serde_json::Value::Null);
    }
    // maximality of largest extensions against every extension, |T| ≤ max, |D| ≤ max + 1
    let targets: Vec<Arc<Semilattice>> =
        corpus.up_to(max + 1).filter(|m| m.flags.distributive).map(|m| m.semilattice.clone()).collect();
    for t in &objects {
        let all_t: Vec<(usize, Vec<Morphism>)> = targets.iter().enumerate().map(|(di, d)| (di, homs(t, d, usize::MAX))).collect();
        for s in &objects {
            for e in embeddings(s, t, usize::MAX) {
                for (di, d) in targets.iter().enumerate() {
                    for g in homs(s, d, usize::MAX) {
                        r.cases += 1;
                        let case = format!("e = {:?}, g = {:?}", e.map(), g.map());
                        let h = match largest_extension(&g, &e) {
                            Ok(h) => h,
                            Err(err) => {
                                r.fail(case, err, serde_json::Value::Null);
                                continue;
                            }
                        };
                        let exts: Vec<&Morphism> = all_t[di]
                            .1
                            .iter()
                            .filter(|k| s.elements().all(|a| k.apply(e.apply(a)) == g.apply(a)))
                            .collect();
                        if !exts.iter().any(|k| k.map() == h.map()) {
                            r.fail(&case, "largest extension is not an extension", serde_json::json!(h.map()));
                        }
                        if let Some(k) = exts.iter().find(|k| t.elements().any(|x| !d.leq(k.apply(x), h.apply(x)))) {
                            r.fail(&case, "an extension exceeds the largest one", serde_json::json!(k.map()));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Diagrams with at most three vertices: single objects, two unrelated
/// objects, spans, cospans and chains, with `sample` arrows per pair.
pub fn diagram_family(objects: &[Arc<Semilattice>], sample: usize) -> Result<Vec<Diagram>> {
    let mut out = Vec::new();
    for x in objects {
        out.push(Diagram::single(x.clone()));
    }
    for (i, x) in objects.iter().enumerate() {
        for y in &objects[i..] {
            out.push(Diagram::new(Poset::antichain(2), vec![x.clone(), y.clone()], [])?);
        }
    }
    let nontrivial: Vec<&Arc<Semilattice>> = objects.iter().filter(|x| x.size() >= 2).collect();
    for x in &nontrivial {
        for (j, y) in nontrivial.iter().enumerate() {
            for z in &nontrivial[j..] {
                let fs = homs(x, y, sample + 1).into_iter().skip(1);
                for f in fs {
                    for g in homs(x, z, sample + 1).into_iter().skip(1) {
                        let span = Poset::new(3, &[(0, 1), (0, 2)])?;
                        out.push(Diagram::new(span, vec![(*x).clone(), (*y).clone(), (*z).clone()], [((0, 1), f.clone()), ((0, 2), g.clone())])?);
                        let cospan = Poset::new(3, &[(1, 0), (2, 0)])?;
                        if let (Some(u), Some(v)) = (homs(y, x, sample + 1).into_iter().nth(1), homs(z, x, sample + 1).into_iter().nth(1)) {
                            out.push(Diagram::new(cospan, vec![(*x).clone(), (*y).clone(), (*z).clone()], [((1, 0), u), ((2, 0), v)])?);
                        }
                        if let Some(h) = homs(y, z, sample + 1).into_iter().nth(1) {
                            let chain = Poset::chain(3);
                            out.push(Diagram::new(chain, vec![(*x).clone(), (*y).clone(), (*z).clone()], [((0, 1), f.clone()), ((1, 2), h)])?);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All cocones from `d` into `t`: components on maximal vertices are free,
/// the others are forced by composition.
pub fn cocones(d: &Diagram, t: &Arc<Semilattice>) -> Vec<Cocone> {
    let idx = d.index();
    let maxes = idx.maximal();
    let choices: Vec<Vec<Morphism>> = maxes.iter().map(|&m| homs(&d.vertices()[m], t, usize::MAX)).collect();
    let mut out = Vec::new();
    if choices.iter().any(|c| c.is_empty()) {
        return out;
    }
    let mut pick = vec![0usize; maxes.len()];
    'outer: loop {
        let mut comps: Vec<Option<Morphism>> = vec![None; idx.size()];
        for (k, &m) in maxes.iter().enumerate() {
            comps[m] = Some(choices[k][pick[k]].clone());
        }
        for v in 0..idx.size() {
            if comps[v].is_none() {
                let m = *maxes.iter().find(|&&m| idx.leq(v, m)).expect("every vertex lies below a maximal one");
                let f = d.arrow(v, m).expect("arrow to a maximal vertex");
                comps[v] = Some(f.then(comps[m].as_ref().unwrap()).expect("composable"));
            }
        }
        let k = Cocone { target: t.clone(), components: comps.into_iter().map(Option::unwrap).collect() };
        if k.check(d).is_ok() {
            out.push(k);
        }
        for c in (0..maxes.len()).rev() {
            pick[c] += 1;
            if pick[c] < choices[c].len() {
                continue 'outer;
            }
            pick[c] = 0;
        }
        break;
    }
    out
}

/// Every cocone into `t` factors through the colimit by exactly one morphism.
pub fn check_universality(c: &ColimitResult, t: &Arc<Semilattice>) -> std::result::Result<usize, String> {
    let ks = cocones(&c.diagram, t);
    let mut hits: HashMap<Vec<Vec<usize>>, usize> = HashMap::new();
    for h in homomorphisms(&c.apex, t, usize::MAX) {
        let comps: Vec<Vec<usize>> = c.legs.iter().map(|l| l.map().iter().map(|&x| h[x]).collect()).collect();
        *hits.entry(comps).or_default() += 1;
    }
    for k in &ks {
        let comps: Vec<Vec<usize>> = k.components.iter().map(|m| m.map().to_vec()).collect();
        match hits.get(&comps) {
            Some(1) => {}
            Some(n) => return Err(format!("cocone {comps:?} factors {n} ways")),
            None => return Err(format!("cocone {comps:?} does not factor")),
        }
        let h = factor_through(c, k).map_err(|e| e.to_string())?;
        if c.legs.iter().zip(&k.components).any(|(l, m)| l.then(&h).map(|x| x.map() != m.map()).unwrap_or(true)) {
            return Err(format!("factor_through gives a wrong factorization of {comps:?}"));
        }
    }
    if hits.len() != ks.len() {
        return Err(format!("{} morphisms out of the apex but {} cocones", hits.len(), ks.len()));
    }
    Ok(ks.len())
}

fn colimit_universality(r: &mut SuiteReport, corpus: &Corpus, max: usize, config: &SuiteConfig) -> Result<()> {
    let objects: Vec<Arc<Semilattice>> = corpus.up_to(max).map(|m| m.semilattice.clone()).collect();
    let targets: Vec<Arc<Semilattice>> = corpus.up_to(max + 1).map(|m| m.semilattice.clone()).collect();
    let family = diagram_family(&objects, config.sample)?;
    let mut cocone_count = 0;
    for (n, d) in family.iter().enumerate() {
        let c = match colimit(d) {
            Ok(c) => c,
            Err(e) => {
                r.fail(format!("diagram {n}"), e, serde_json::to_value(d.to_record())?);
                continue;
            }
        };
        for t in &targets {
            r.cases += 1;
            match check_universality(&c, t) {
                Ok(k) => cocone_count += k,
                Err(e) => r.fail(format!("diagram {n} into size {}", t.size()), e, serde_json::to_value(d.to_record())?),
            }
        }
    }
    r.notes.push(format!("{} diagrams, {} targets, {cocone_count} cocones", family.len(), targets.len()));
    Ok(())
}

fn gs_suite(r: &mut SuiteReport, corpus: &Corpus, config: &SuiteConfig) {
    let lattices: Vec<(&Arc<Semilattice>, &str)> =
        corpus.members.iter().filter(|m| m.semilattice.size() >= 2).map(|m| (&m.semilattice, m.key.as_str())).collect();
    for (k, key) in &lattices {
        r.cases += 1;
        match gs_checks(k) {
            Ok(rep) => {
                for v in &rep.violations {
                    r.fail(tag(k, key), v, serde_json::Value::Null);
                }
            }
            Err(e) => r.fail(tag(k, key), e, serde_json::Value::Null),
        }
    }
    let mut tested: Vec<Morphism> = Vec::new();
    for (i, (x, _)) in lattices.iter().enumerate() {
        for (j, (y, _)) in lattices.iter().enumerate() {
            let fs = if i == j { automorphisms(x) } else { embeddings(x, y, config.sample) };
            for f in fs {
                r.cases += 1;
                match gs_morphism(&f) {
                    Ok(_) => tested.push(f),
                    Err(e) => r.fail(format!("{:?}", f.map()), e, serde_json::Value::Null),
                }
            }
        }
    }
    for f in &tested {
        for g in tested.iter().filter(|g| g.src().as_ref() == f.dst().as_ref()) {
            r.cases += 1;
            let ok = (|| -> Result<bool> {
                let lhs = gs_morphism(&f.then(g)?)?;
                let rhs = gs_morphism(f)?.then(&gs_morphism(g)?)?;
                Ok(lhs.map() == rhs.map())
            })();
            if !matches!(ok, Ok(true)) {
                r.fail(format!("{:?} then {:?}", f.map(), g.map()), "GS(g ∘ f) ≠ GS(g) ∘ GS(f)", serde_json::Value::Null);
            }
        }
    }
}

fn counterexample(r: &mut SuiteReport, config: &SuiteConfig) -> Result<()> {
    let c = build_counterexample()?;
    for k in &c.constraints {
        r.cases += 1;
        r.notes.push(format!("constraint {}: {}", k.name, if k.holds { "holds" } else { "fails" }));
        if !k.holds {
            r.fail("constraint", k.name, serde_json::Value::Null);
        }
    }
    let e = &c.elements;
    let sizes: Vec<usize> = c.system.vertices().iter().map(|v| v.size()).collect();
    r.notes.push(format!("vertex sizes S, A1, A2, A: {sizes:?}"));
    r.cases += 1;
    let p = c.at(SQUARE_S, e.p);
    let res = necess_check(&c.system, SQUARE_S, SQUARE_A, p)?;
    let mut want = vec![
        (c.at(SQUARE_A, e.q1), vec![(SQUARE_A1, c.at(SQUARE_A1, e.r1))]),
        (c.at(SQUARE_A, e.q2), vec![(SQUARE_A2, c.at(SQUARE_A2, e.r2))]),
    ];
    want.sort();
    match &res {
        NecessResult::Fail(fails) => {
            let got: Vec<(usize, Vec<(usize, usize)>)> = fails.iter().map(|f| (f.q, f.violations.clone())).collect();
            r.notes.push(format!("necess_check(S, A, p) fails with {}", serde_json::to_string(fails)?));
            if got != want {
                r.fail("necess_check", "unexpected witnesses", serde_json::to_value(fails)?);
            }
        }
        NecessResult::Pass(q) => r.fail("necess_check", format!("passes with q = {q}"), serde_json::Value::Null),
    }
    for (filter, label) in [(true, "with"), (false, "without")] {
        r.cases += 1;
        let opts = SearchOptions { max_atoms: config.max_atoms, work_limit: config.work_limit, necess_filter: filter };
        match search_simultaneous_with(&c.system, &opts) {
            Ok(SearchOutcome::Exhausted { nodes, reason }) => {
                let why = match reason {
                    ExhaustReason::Searched => "search space exhausted".to_string(),
                    ExhaustReason::Necess { i, j, p, .. } => format!("necessary condition fails at ({i}, {j}, {p})"),
                    ExhaustReason::NotDistributive(v) => format!("vertex {v} is not distributive"),
                };
                r.notes.push(format!("search {label} the necessary-condition filter: Exhausted after {nodes} nodes ({why})"));
            }
            Ok(SearchOutcome::Found(se)) => {
                r.fail(format!("search {label} filter"), "found a simultaneous embedding", serde_json::json!(se.targets))
            }
            Err(err) => r.fail(format!("search {label} filter"), err, serde_json::Value::Null),
        }
    }
    Ok(())
}

fn size_bounds(r: &mut SuiteReport, corpus: &Corpus, store: &CoverStore) {
    for m in corpus.members.iter().filter(|m| m.flags.distributive) {
        if let Err(e) = store.phi_object(&m.semilattice) {
            r.fail(tag(&m.semilattice, &m.key), e, serde_json::Value::Null);
        }
    }
    let rep = size_bound_report(store);
    for l in &rep.lines {
        r.cases += 1;
        r.notes.push(format!(
            "size {}: |Φ_*| = {}, generators = {}, bound exponent = {}",
            l.size, l.phi_star_size, l.generator_count, l.bound_exponent
        ));
        if !l.holds || !l.generator_bound_holds {
            r.fail(format!("size {}", l.size), "size bound fails", serde_json::to_value(l).unwrap_or_default());
        }
    }
}

fn atomistic_image(r: &mut SuiteReport, corpus: &Corpus) -> Result<()> {
    for m in corpus.members.iter().filter(|m| m.flags.atomistic) {
        for g in surjective_lattice_images(&m.semilattice)? {
            r.cases += 1;
            let rep = atomistic_image_check(&m.semilattice, &g)?;
            if !rep.ok() {
                r.fail(tag(&m.semilattice, &m.key), "non-atomistic image", serde_json::to_value(&rep)?);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        let store = CoverStore::new();
        assert!(matches!(run_suite("nope", &SuiteConfig::default(), &store), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn small_suites_pass() {
        let store = CoverStore::new();
        let cfg = SuiteConfig { max_size: Some(3), ..SuiteConfig::default() };
        for name in ["retraction", "naturality", "functoriality", "shelter-laws", "colimit-universality", "gs", "size-bounds"] {
            let r = run_suite(name, &cfg, &store).unwrap();
            assert!(r.ok(), "{name}: {:?}", r.violations);
            assert!(r.cases > 0, "{name}");
        }
    }

    #[test]
    fn counterexample_suite_reports_witnesses() {
        let store = CoverStore::new();
        let r = run_suite("counterexample", &SuiteConfig::default(), &store).unwrap();
        assert!(r.ok(), "{:?}", r.violations);
        assert!(r.notes.iter().any(|n| n.contains("necess_check")));
    }

    #[test]
    fn grid_is_distributive() {
        let g = &curated_size_six()[0];
        assert!(crate::lattice::is_distributive(g));
        assert_eq!(g.atoms().len(), 2);
    }
}

//! Zero-separating trimming, the size bound for `Φ_*`, and retraction of
//! direct systems.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{BoolMap, CoverEntry, CoverStore, PhiObject};
use crate::error::{Error, Result};
use crate::lattice::Morphism;
use crate::simult::DirectSystem;

/// `Φ(A)` cut down to the interval `[b_A, 1]`, where `b_A` is the largest
/// element sent to zero by `μ_A`. The interval is re-indexed as the powerset
/// of the atoms outside `b_A`.
#[derive(Clone, Debug)]
pub struct Trimmed {
    pub key: String,
    /// atoms of `Φ(A)` outside `b_A`, in order; trimmed atom `t` is `kept[t]`
    pub kept: Vec<usize>,
    pub b: FixedBitSet,
    pub eps: Vec<FixedBitSet>,
    pub mu: Vec<usize>,
}

impl Trimmed {
    pub fn atoms(&self) -> usize {
        self.kept.len()
    }

    /// Re-indexes a subset of `Φ(A)` after removing `b_A`.
    fn project(&self, x: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.kept.len());
        for (t, &a) in self.kept.iter().enumerate() {
            if x.contains(a) {
                out.insert(t);
            }
        }
        out
    }
}

pub fn trim_entry(e: &CoverEntry) -> Trimmed {
    let mut b = FixedBitSet::with_capacity(e.atoms);
    for t in 0..e.atoms {
        if e.mu[t] == e.object.zero() {
            b.insert(t);
        }
    }
    let kept: Vec<usize> = (0..e.atoms).filter(|&t| !b.contains(t)).collect();
    let mut tr = Trimmed { key: e.key.clone(), kept, b, eps: Vec::new(), mu: Vec::new() };
    // ε'(a) = ε(a) ∨ b, re-indexed
    tr.eps = e.eps.iter().map(|x| tr.project(x)).collect();
    tr.mu = tr.kept.iter().map(|&t| e.mu[t]).collect();
    tr
}

/// The trimmed action `x ↦ Φ(f)(x) ∨ b_Y` on `[b_X, 1] → [b_Y, 1]`, re-indexed.
pub fn trimmed_morphism(f: &Morphism, store: &CoverStore) -> Result<BoolMap> {
    let phi = store.phi_embedding(f)?;
    let x = trim_entry(&store.phi_object(f.src())?.entry);
    let y = trim_entry(&store.phi_object(f.dst())?.entry);
    Ok(BoolMap {
        src_atoms: x.atoms(),
        dst_atoms: y.atoms(),
        images: x.kept.iter().map(|&t| y.project(&phi.images[t])).collect(),
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TrimReport {
    pub entries: usize,
    /// entries whose `b_A` is nonzero
    pub trimmed: usize,
    pub violations: Vec<String>,
}

/// Trims every stored entry and re-checks, on the trimmed data, zero
/// separation, the retraction, unit preservation, and the squares for the
/// stored subobject inclusions.
pub fn trim_zero(store: &CoverStore) -> TrimReport {
    let mut report = TrimReport::default();
    for e in store.entries() {
        report.entries += 1;
        let t = trim_entry(&e);
        if t.b.count_ones(..) > 0 {
            report.trimmed += 1;
        }
        let tag = format!("{} (size {})", &e.key[..12], e.size());
        let a = &e.object;
        let mu_of = |x: &FixedBitSet| a.join_all(x.ones().map(|i| t.mu[i]));
        if t.mu.iter().any(|&m| m == a.zero()) {
            report.violations.push(format!("{tag}: μ does not separate zero"));
        }
        if a.elements().any(|x| mu_of(&t.eps[x]) != x) {
            report.violations.push(format!("{tag}: μ ∘ ε ≠ id after trimming"));
        }
        if t.eps[a.top()].count_ones(..) != t.atoms() {
            report.violations.push(format!("{tag}: ε(1) ≠ 1 after trimming"));
        }
        for (i, leg) in e.sub_legs.iter().enumerate() {
            let Some(sub) = store.get(&e.sub_keys[i]) else {
                report.violations.push(format!("{tag}: missing subobject entry"));
                continue;
            };
            let ts = trim_entry(&sub);
            let tleg =
                BoolMap { src_atoms: ts.atoms(), dst_atoms: t.atoms(), images: ts.kept.iter().map(|&k| t.project(&leg.images[k])).collect() };
            let sub_elems = &e.subobjects[i];
            for (p, &x) in sub_elems.iter().enumerate() {
                if tleg.apply(&ts.eps[e.sub_isos[i][p]]) != t.eps[x] {
                    report.violations.push(format!("{tag}: ε-square fails for subobject {i} after trimming"));
                    break;
                }
            }
            for (k, im) in tleg.images.iter().enumerate() {
                let m = ts.mu[k];
                let pos = e.sub_isos[i].iter().position(|&c| c == m).unwrap();
                if mu_of(im) != sub_elems[pos] {
                    report.violations.push(format!("{tag}: μ-square fails for subobject {i} after trimming"));
                    break;
                }
            }
            if !tleg.is_embedding() {
                report.violations.push(format!("{tag}: trimmed Φ(incl) for subobject {i} is not an embedding"));
            }
        }
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeBoundLine {
    pub key: String,
    pub size: usize,
    pub phi_star_size: usize,
    pub generator_count: usize,
    /// `log2 φ(n)` for `n = |A| - 1`, over the stored entries of size at most `n`
    pub log2_phi_below: usize,
    /// exponent `n + 1 + 2^n φ(n)` of the bound, saturating
    pub bound_exponent: u128,
    pub holds: bool,
    /// `|Φ_*(A)| ≤ 2^{generator_count}`
    pub generator_bound_holds: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SizeBoundReport {
    pub lines: Vec<SizeBoundLine>,
}

impl SizeBoundReport {
    pub fn ok(&self) -> bool {
        self.lines.iter().all(|l| l.holds && l.generator_bound_holds)
    }
}

fn fits(observed: usize, exponent: u128) -> bool {
    exponent >= 64 || (observed as u128) <= 1u128 << exponent
}

pub fn size_bound_report(store: &CoverStore) -> SizeBoundReport {
    let entries = store.entries();
    let lines = entries
        .iter()
        .map(|e| {
            let m = e.size();
            let n = m - 1;
            let k_max = entries.iter().filter(|x| x.size() <= n).map(|x| x.atoms).max();
            // φ(n) = max |Φ(X)| = 2^{atoms}; no objects of size 0
            let phi: u128 = match k_max {
                None => 0,
                Some(k) if k < 127 => 1u128 << k,
                Some(_) => u128::MAX,
            };
            let two_n: u128 = if n < 127 { 1u128 << n } else { u128::MAX };
            let exponent = (m as u128).saturating_add(two_n.saturating_mul(phi));
            SizeBoundLine {
                key: e.key.clone(),
                size: m,
                phi_star_size: e.phi_star_size,
                generator_count: e.generator_count,
                log2_phi_below: k_max.unwrap_or(0),
                bound_exponent: exponent,
                holds: fits(e.phi_star_size, exponent),
                generator_bound_holds: fits(e.phi_star_size, e.generator_count as u128),
            }
        })
        .collect();
    SizeBoundReport { lines }
}

/// `Φ` applied to a direct system of embeddings, with its `ε`- and `μ`-families.
#[derive(Clone, Debug)]
pub struct RetractedSystem {
    pub objects: Vec<PhiObject>,
    pub transitions: Vec<((usize, usize), BoolMap)>,
    pub violations: Vec<String>,
}

/// Applies `Φ` vertexwise and transitionwise and checks that `ε` and `μ`
/// commute with the transitions, that units are preserved, and that `Φ`
/// composes along every chain `i < j < k`.
pub fn retract_system(sys: &DirectSystem, store: &CoverStore) -> Result<RetractedSystem> {
    let objects: Vec<PhiObject> =
        sys.vertices().iter().map(|v| store.phi_object(v)).collect::<Result<Vec<_>>>()?;
    let mut transitions = Vec::new();
    let mut violations = Vec::new();
    for ((i, j), f) in sys.transitions() {
        let phi = store.phi_embedding(f)?;
        let (x, y) = (&objects[i], &objects[j]);
        if f.src().elements().any(|a| phi.apply(x.eps(a)) != *y.eps(f.apply(a))) {
            violations.push(format!("ε-square fails on {i}->{j}"));
        }
        if (0..x.atoms()).any(|t| y.mu(&phi.images[t]) != f.apply(x.mu_atom(t))) {
            violations.push(format!("μ-square fails on {i}->{j}"));
        }
        if !phi.is_embedding() {
            violations.push(format!("Φ({i}->{j}) is not an embedding"));
        }
        if f.flags().preserves_unit && !phi.preserves_unit() {
            violations.push(format!("Φ({i}->{j}) does not preserve the unit"));
        }
        transitions.push(((i, j), phi));
    }
    for o in &objects {
        if *o.eps(o.object().top()) != super::full(o.atoms()) {
            violations.push("ε does not preserve the unit".into());
        }
    }
    let lookup = |i: usize, j: usize| transitions.iter().find(|((a, b), _)| *a == i && *b == j).map(|(_, m)| m);
    for ((i, j), f) in &transitions {
        for ((j2, k), g) in &transitions {
            if j2 == j {
                let direct = lookup(*i, *k).ok_or_else(|| Error::Internal("missing composite transition".into()))?;
                if f.then(g)? != *direct {
                    violations.push(format!("Φ fails to compose along {i} < {j} < {k}"));
                }
            }
        }
    }
    Ok(RetractedSystem { objects, transitions, violations })
}

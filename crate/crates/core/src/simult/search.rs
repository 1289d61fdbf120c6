//! Simultaneous lattice embeddings into Boolean direct systems: validation,
//! the `μ`-family of an embedding, and bounded exhaustive search.
//!
//! A `⟨∨,∧,0,1⟩`-embedding of a finite distributive lattice `A` into `𝔓(X)`
//! is `ε(a) = { x : μ(x) ≤ a }` for a surjection `μ: X → J(A)`. A join
//! homomorphism `g: 𝔓(X_i) → 𝔓(X_j)` is given by the preimage sets
//! `pre(η) = { ξ : η ∈ g(ξ) }`, and `g ∘ ε_i = ε_j ∘ f` holds iff for every
//! `η` the minimal elements of `μ_i(pre(η))` are exactly `∂^{i,j} μ_j(η)`.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::obstruct::{boundary, first_necess_failure, NecessFailure};
use super::DirectSystem;
use crate::cover::BoolMap;
use crate::error::{Error, Result};
use crate::lattice::{is_distributive, join_irreducibles, Semilattice};

/// Largest atom count a search target may have.
pub const SEARCH_ATOM_CAP: usize = 32;
/// Largest interval in which every subset is checked by [`mu_family`].
pub const MU_FAMILY_ATOM_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimultEmbedding {
    /// atom count of each `B_i`
    pub targets: Vec<usize>,
    /// `ε_i(a)` for every vertex `i` and element `a`
    pub components: Vec<Vec<FixedBitSet>>,
    /// `g_{i,j}` for every strict relation `i < j`, ordered by `(i, j)`
    pub transitions: Vec<((usize, usize), BoolMap)>,
}

impl SimultEmbedding {
    pub fn transition(&self, i: usize, j: usize) -> Option<&BoolMap> {
        self.transitions.iter().find(|((a, b), _)| *a == i && *b == j).map(|(_, g)| g)
    }

    fn check_components(&self, sys: &DirectSystem) -> Result<()> {
        let verts = sys.vertices();
        if self.components.len() != verts.len() || self.targets.len() != verts.len() {
            return Err(Error::MapLength { len: self.components.len(), size: verts.len() });
        }
        for (v, a) in verts.iter().enumerate() {
            let eps = &self.components[v];
            if eps.len() != a.size() {
                return Err(Error::MapLength { len: eps.len(), size: a.size() });
            }
            if eps.iter().any(|s| s.len() != self.targets[v]) {
                return Err(Error::IllFormed(format!("component {v} has the wrong target width")));
            }
            for x in a.elements() {
                for y in a.elements() {
                    let mut u = eps[x].clone();
                    u.union_with(&eps[y]);
                    if u != eps[a.join(x, y)] {
                        return Err(Error::NotJoinPreserving { x, y });
                    }
                    let mut m = eps[x].clone();
                    m.intersect_with(&eps[y]);
                    if m != eps[a.meet(x, y)] {
                        return Err(Error::NotMeetPreserving { x, y });
                    }
                    if x < y && eps[x] == eps[y] {
                        return Err(Error::NotEmbedding);
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks that every `ε_i` is a lattice embedding, every `g_{i,j}` a
    /// join embedding, `g` is functorial, and `ε_j ∘ f_{i,j} = g_{i,j} ∘ ε_i`.
    pub fn validate(&self, sys: &DirectSystem) -> Result<()> {
        self.check_components(sys)?;
        let idx = sys.index();
        for (i, j) in idx.relations().into_iter().filter(|(i, j)| i != j) {
            let g = self.transition(i, j).ok_or_else(|| Error::NotFunctorial(format!("missing target map {i}->{j}")))?;
            if g.src_atoms != self.targets[i] || g.dst_atoms != self.targets[j] || g.images.len() != g.src_atoms {
                return Err(Error::NotFunctorial(format!("target map {i}->{j} has the wrong shape")));
            }
            if !g.is_embedding() {
                return Err(Error::NotFunctorial(format!("target map {i}->{j} is not an embedding")));
            }
            let f = sys.transition(i, j).expect("relation has a transition");
            for a in f.src().elements() {
                if g.apply(&self.components[i][a]) != self.components[j][f.apply(a)] {
                    return Err(Error::NotFunctorial(format!("square {i}->{j} fails at {a}")));
                }
            }
            for k in (0..idx.size()).filter(|&k| k != j && idx.lt(j, k)) {
                let h = self.transition(j, k).ok_or_else(|| Error::NotFunctorial(format!("missing target map {j}->{k}")))?;
                let direct = self.transition(i, k).ok_or_else(|| Error::NotFunctorial(format!("missing target map {i}->{k}")))?;
                if g.then(h)? != *direct {
                    return Err(Error::NotFunctorial(format!("target maps fail to compose along {i} < {j} < {k}")));
                }
            }
        }
        Ok(())
    }
}

/// `μ_i` on the atoms of each interval `[ε_i(0), ε_i(1)]`, with the outcome of
/// the elementary checks on it.
#[derive(Clone, Debug, Serialize)]
pub struct MuFamily {
    /// atoms of `B_i` lying in `ε_i(1)` but not in `ε_i(0)`
    pub atoms: Vec<Vec<usize>>,
    /// `μ_i` of those atoms, as elements of `A_i`
    pub mu: Vec<Vec<usize>>,
    pub violations: Vec<String>,
}

impl MuFamily {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Local {
    atoms: Vec<usize>,
    /// `ε_i(a)` restricted to `atoms`, as a bitmask
    eps: Vec<u64>,
}

impl Local {
    fn project(&self, s: &FixedBitSet) -> u64 {
        self.atoms.iter().enumerate().filter(|&(_, &t)| s.contains(t)).fold(0, |m, (k, _)| m | 1 << k)
    }

    fn embed(&self, x: u64, width: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(width);
        for (k, &t) in self.atoms.iter().enumerate() {
            if x >> k & 1 == 1 {
                s.insert(t);
            }
        }
        s
    }
}

fn bits(x: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |k| x >> k & 1 == 1)
}

/// The least `a` with `x ⊆ ε(a)`, from the definition.
fn least_above(a: &Semilattice, eps: &[u64], x: u64) -> Option<usize> {
    let ups: Vec<usize> = a.elements().filter(|&y| x & !eps[y] == 0).collect();
    let m = a.meet_all(ups.iter().copied());
    (x & !eps[m] == 0).then_some(m)
}

/// Normalizes every `B_i` to `[ε_i(0), ε_i(1)]`, defines `μ_i(x)` as the least
/// `a` with `x ≤ ε_i(a)`, and checks: `μ∘ε = id`; `x ≤ εμ(x)`; the adjunction
/// `x ≤ ε(a) ⟺ μ(x) ≤ a`; `μ` of an atom is join-irreducible;
/// `ε(a) = ⋁{ξ : μ(ξ) ≤ a}`; `μ_j∘g_{i,j}(x) ≤ μ_i(x)`; `ξ ⊴ η ⟹ μ_j(η) ≤ μ_i(ξ)`
/// where `ξ ⊴ η` means `η ≤ g_{i,j}(ξ)`; and `∂^{i,j}μ_j(η) ⊆ {μ_i(ξ) : ξ ⊴ η}`.
pub fn mu_family(sys: &DirectSystem, se: &SimultEmbedding) -> Result<MuFamily> {
    se.validate(sys)?;
    let verts = sys.vertices();
    let mut locals = Vec::new();
    for (v, a) in verts.iter().enumerate() {
        let eps = &se.components[v];
        let atoms: Vec<usize> = eps[a.top()].difference(&eps[a.zero()]).collect();
        if atoms.len() > MU_FAMILY_ATOM_CAP {
            return Err(Error::SizeCapExceeded {
                what: format!("interval atoms of vertex {v}"),
                needed: atoms.len() as u128,
                cap: MU_FAMILY_ATOM_CAP as u128,
            });
        }
        let mut l = Local { atoms, eps: Vec::new() };
        l.eps = eps.iter().map(|s| l.project(s)).collect();
        locals.push(l);
    }
    let mut violations = Vec::new();
    let mut mus: Vec<Vec<usize>> = Vec::new();
    for (v, a) in verts.iter().enumerate() {
        let l = &locals[v];
        let k = l.atoms.len();
        let mut mu_atoms = Vec::with_capacity(k);
        for t in 0..k {
            match least_above(a, &l.eps, 1 << t) {
                Some(m) => mu_atoms.push(m),
                None => return Err(Error::Internal(format!("no least element above atom {t} of vertex {v}"))),
            }
        }
        let mu = |x: u64| a.join_all(bits(x).map(|t| mu_atoms[t]));
        let irr = join_irreducibles(a);
        if a.elements().any(|x| mu(l.eps[x]) != x) {
            violations.push(format!("vertex {v}: μ∘ε ≠ id"));
        }
        for x in 0..1u64 << k {
            if least_above(a, &l.eps, x) != Some(mu(x)) {
                violations.push(format!("vertex {v}: μ is not a join of its atom values at {x:#b}"));
                break;
            }
            if x & !l.eps[mu(x)] != 0 {
                violations.push(format!("vertex {v}: x ≰ εμ(x) at {x:#b}"));
                break;
            }
            if a.elements().any(|y| (x & !l.eps[y] == 0) != a.leq(mu(x), y)) {
                violations.push(format!("vertex {v}: adjunction fails at {x:#b}"));
                break;
            }
        }
        if let Some(t) = (0..k).find(|&t| !irr.contains(&mu_atoms[t])) {
            violations.push(format!("vertex {v}: μ of atom {t} is not join-irreducible"));
        }
        for y in a.elements() {
            let below = (0..k).filter(|&t| a.leq(mu_atoms[t], y)).fold(0u64, |m, t| m | 1 << t);
            if below != l.eps[y] {
                violations.push(format!("vertex {v}: ε({y}) is not the join of the atoms below it"));
            }
        }
        mus.push(mu_atoms);
    }
    for ((i, j), g) in &se.transitions {
        let f = sys.transition(*i, *j).expect("relation has a transition");
        let (li, lj) = (&locals[*i], &locals[*j]);
        let (ai, aj) = (&verts[*i], &verts[*j]);
        let mu_j = |x: u64| aj.join_all(bits(x).map(|t| mus[*j][t]));
        let mu_i = |x: u64| ai.join_all(bits(x).map(|t| mus[*i][t]));
        let g_loc = |x: u64| lj.project(&g.apply(&li.embed(x, se.targets[*i])));
        for x in 0..1u64 << li.atoms.len() {
            if !aj.leq(mu_j(g_loc(x)), f.apply(mu_i(x))) {
                violations.push(format!("{i}->{j}: μ_j∘g(x) ≰ μ_i(x) at {x:#b}"));
                break;
            }
        }
        for eta in 0..lj.atoms.len() {
            let sources: Vec<usize> = (0..li.atoms.len()).filter(|&xi| g_loc(1 << xi) >> eta & 1 == 1).collect();
            if let Some(&xi) = sources.iter().find(|&&xi| !aj.leq(mus[*j][eta], f.apply(mus[*i][xi]))) {
                violations.push(format!("{i}->{j}: atom {xi} ⊴ atom {eta} but μ_j(η) ≰ μ_i(ξ)"));
            }
            let lifted: Vec<usize> = sources.iter().map(|&xi| mus[*i][xi]).collect();
            let bd = boundary(sys, *i, *j, mus[*j][eta])?;
            if bd.iter().any(|r| !lifted.contains(r)) {
                violations.push(format!("{i}->{j}: ∂μ_j(η) ⊄ μ_i(ξ ⊴ η) at atom {eta}"));
            }
        }
    }
    Ok(MuFamily { atoms: locals.into_iter().map(|l| l.atoms).collect(), mu: mus, violations })
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_atoms: usize,
    /// node expansions before giving up with `BoundTooLarge`
    pub work_limit: u64,
    /// return `Exhausted` at once when the necessary condition fails
    pub necess_filter: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_atoms: 6, work_limit: 100_000_000, necess_filter: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum ExhaustReason {
    /// the whole bounded space was searched
    Searched,
    /// `necess_check(i, j, p)` failed
    Necess { i: usize, j: usize, p: usize, failures: Vec<NecessFailure> },
    /// a vertex is not distributive, so it has no lattice embedding into a Boolean lattice
    NotDistributive(usize),
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(SimultEmbedding),
    Exhausted { nodes: u64, reason: ExhaustReason },
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&SimultEmbedding> {
        match self {
            SearchOutcome::Found(s) => Some(s),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

pub fn search_simultaneous(sys: &DirectSystem, max_atoms: usize) -> Result<SearchOutcome> {
    search_simultaneous_with(sys, &SearchOptions { max_atoms, ..SearchOptions::default() })
}

/// Backtracking over `μ_i` (atom multiplicities per join-irreducible, so one
/// representative per orbit of atom relabelings) and preimage sets of the
/// cover transitions, vertices in a linear extension of the index. Returns
/// the first embedding in that order.
pub fn search_simultaneous_with(sys: &DirectSystem, opts: &SearchOptions) -> Result<SearchOutcome> {
    if opts.max_atoms > SEARCH_ATOM_CAP {
        return Err(Error::SizeCapExceeded {
            what: "search atoms".into(),
            needed: opts.max_atoms as u128,
            cap: SEARCH_ATOM_CAP as u128,
        });
    }
    if let Some(v) = sys.vertices().iter().position(|a| !is_distributive(a)) {
        return Ok(SearchOutcome::Exhausted { nodes: 0, reason: ExhaustReason::NotDistributive(v) });
    }
    if opts.necess_filter {
        if let Some((i, j, p, failures)) = first_necess_failure(sys)? {
            return Ok(SearchOutcome::Exhausted { nodes: 0, reason: ExhaustReason::Necess { i, j, p, failures } });
        }
    }
    let mut s = Search::new(sys, opts)?;
    if s.vertex(0)? {
        let se = s.assemble();
        se.validate(sys).map_err(|e| Error::Internal(format!("search produced an invalid embedding: {e}")))?;
        return Ok(SearchOutcome::Found(se));
    }
    Ok(SearchOutcome::Exhausted { nodes: s.nodes, reason: ExhaustReason::Searched })
}

/// One admissible choice for a target atom `η`: `pre_{k,v}(η)` for every `k < v`.
#[derive(Clone, Debug)]
struct Choice {
    pre: Vec<u64>,
}

struct Search<'a> {
    sys: &'a DirectSystem,
    opts: &'a SearchOptions,
    order: Vec<usize>,
    irr: Vec<Vec<usize>>,
    /// strictly lower vertices, and lower covers, of each vertex
    below: Vec<Vec<usize>>,
    covers: Vec<Vec<usize>>,
    /// `bd[v][c][q]`: boundary `∂^{covers[v][c], v}` of `irr[v][q]` as irreducible indices, and its up-set in `J`
    bd: Vec<Vec<Vec<(u64, u64)>>>,
    /// per vertex: `μ` of each atom as an irreducible index
    atom_mu: Vec<Vec<usize>>,
    /// per vertex: chosen `pre_{below[v][k], v}(η)` for every atom `η`
    pre: Vec<Vec<Vec<u64>>>,
    nodes: u64,
}

fn compositions(parts: usize, max: usize) -> Vec<Vec<usize>> {
    fn go(parts: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == parts {
            out.push(cur.clone());
            return;
        }
        let rest = parts - cur.len() - 1;
        for c in 1..=left.saturating_sub(rest) {
            cur.push(c);
            go(parts, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts <= max {
        go(parts, max, &mut Vec::new(), &mut out);
    }
    out
}

impl<'a> Search<'a> {
    fn new(sys: &'a DirectSystem, opts: &'a SearchOptions) -> Result<Self> {
        let idx = sys.index();
        let n = idx.size();
        let irr: Vec<Vec<usize>> = sys.vertices().iter().map(|a| join_irreducibles(a)).collect();
        let below: Vec<Vec<usize>> = (0..n).map(|v| (0..n).filter(|&k| idx.lt(k, v)).collect()).collect();
        let covers: Vec<Vec<usize>> =
            (0..n).map(|v| idx.covers().iter().filter(|&&(_, b)| b == v).map(|&(a, _)| a).collect()).collect();
        let mut bd = Vec::with_capacity(n);
        for v in 0..n {
            let mut per_cover = Vec::new();
            for &i in &covers[v] {
                let ai = &sys.vertices()[i];
                let mut per_q = Vec::new();
                for &q in &irr[v] {
                    let b = boundary(sys, i, v, q)?;
                    let mut need = 0u64;
                    let mut allow = 0u64;
                    for (t, &r) in irr[i].iter().enumerate() {
                        if b.contains(&r) {
                            need |= 1 << t;
                        }
                        if b.iter().any(|&m| ai.leq(m, r)) {
                            allow |= 1 << t;
                        }
                    }
                    per_q.push((need, allow));
                }
                per_cover.push(per_q);
            }
            bd.push(per_cover);
        }
        Ok(Search {
            sys,
            opts,
            order: idx.linear_extension(),
            irr,
            below,
            covers,
            bd,
            atom_mu: vec![Vec::new(); n],
            pre: vec![Vec::new(); n],
            nodes: 0,
        })
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.opts.work_limit {
            return Err(Error::BoundTooLarge(self.nodes));
        }
        Ok(())
    }

    /// Admissible preimage sets in `X_i` for a target atom over irreducible `q`
    /// along the cover `c` of `v`.
    fn options(&self, v: usize, c: usize, q: usize) -> Vec<u64> {
        let i = self.covers[v][c];
        let (need, allow) = self.bd[v][c][q];
        let mu = &self.atom_mu[i];
        let allowed = mu.iter().enumerate().filter(|&(_, &m)| allow >> m & 1 == 1).fold(0u64, |s, (t, _)| s | 1 << t);
        let mut out = Vec::new();
        let mut sub = allowed;
        loop {
            let hit = bits(sub).fold(0u64, |s, t| s | 1 << mu[t]);
            if hit & need == need {
                out.push(sub);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & allowed;
        }
        out.sort_unstable();
        out
    }

    /// Choices for an atom over `q`, consistent along every pair of paths.
    /// Covers are joined one at a time on the lower vertices they share.
    fn choices(&mut self, v: usize, q: usize) -> Result<Vec<Choice>> {
        let cov = self.covers[v].clone();
        let below = self.below[v].clone();
        let mut partial: Vec<Vec<Option<u64>>> = vec![vec![None; below.len()]];
        let mut defined = vec![false; below.len()];
        for (c, &i) in cov.iter().enumerate() {
            // positions of `below[v]` reached through `i`, with their index in `below[i]`
            let reach: Vec<(usize, Option<usize>)> = below
                .iter()
                .enumerate()
                .filter_map(|(kk, &k)| {
                    if k == i {
                        Some((kk, None))
                    } else {
                        self.below[i].iter().position(|&x| x == k).map(|p| (kk, Some(p)))
                    }
                })
                .collect();
            let shared: Vec<usize> = reach.iter().map(|&(kk, _)| kk).filter(|&kk| defined[kk]).collect();
            let mut by_key: HashMap<Vec<u64>, Vec<Vec<(usize, u64)>>> = HashMap::new();
            for t in self.options(v, c, q) {
                self.tick()?;
                let vals: Vec<(usize, u64)> = reach
                    .iter()
                    .map(|&(kk, p)| match p {
                        None => (kk, t),
                        Some(p) => (kk, bits(t).fold(0u64, |s, xi| s | self.pre[i][xi][p])),
                    })
                    .collect();
                let key = shared.iter().map(|kk| vals.iter().find(|(x, _)| x == kk).unwrap().1).collect();
                by_key.entry(key).or_default().push(vals);
            }
            let mut next = Vec::new();
            for part in &partial {
                let key: Vec<u64> = shared.iter().map(|&kk| part[kk].expect("shared position is defined")).collect();
                if let Some(list) = by_key.get(&key) {
                    for vals in list {
                        self.tick()?;
                        let mut ext = part.clone();
                        for &(kk, x) in vals {
                            ext[kk] = Some(x);
                        }
                        next.push(ext);
                    }
                }
            }
            partial = next;
            for &(kk, _) in &reach {
                defined[kk] = true;
            }
        }
        Ok(partial
            .into_iter()
            .map(|p| Choice { pre: p.into_iter().map(|x| x.expect("every lower vertex lies below a cover")).collect() })
            .collect())
    }

    fn vertex(&mut self, pos: usize) -> Result<bool> {
        if pos == self.order.len() {
            return Ok(true);
        }
        let v = self.order[pos];
        let m = self.irr[v].len();
        let mut per_q = Vec::with_capacity(m);
        for q in 0..m {
            let c = self.choices(v, q)?;
            if c.is_empty() {
                return Ok(false);
            }
            per_q.push(c);
        }
        for counts in compositions(m, self.opts.max_atoms) {
            self.tick()?;
            self.atom_mu[v] = counts.iter().enumerate().flat_map(|(q, &c)| std::iter::repeat_n(q, c)).collect();
            let mut picks = Vec::with_capacity(self.atom_mu[v].len());
            if self.fill(v, pos, &per_q, &mut picks)? {
                return Ok(true);
            }
        }
        self.atom_mu[v].clear();
        self.pre[v].clear();
        Ok(false)
    }

    /// Chooses target atoms one at a time, non-decreasing within a group.
    fn fill(&mut self, v: usize, pos: usize, per_q: &[Vec<Choice>], picks: &mut Vec<usize>) -> Result<bool> {
        let t = picks.len();
        if !self.privacy_reachable(v, per_q, picks) {
            return Ok(false);
        }
        if t == self.atom_mu[v].len() {
            self.tick()?;
            self.pre[v] = picks
                .iter()
                .enumerate()
                .map(|(eta, &c)| per_q[self.atom_mu[v][eta]][c].pre.clone())
                .collect();
            return self.vertex(pos + 1);
        }
        let q = self.atom_mu[v][t];
        let start = if t > 0 && self.atom_mu[v][t - 1] == q { picks[t - 1] } else { 0 };
        for c in start..per_q[q].len() {
            self.tick()?;
            picks.push(c);
            if self.fill(v, pos, per_q, picks)? {
                return Ok(true);
            }
            picks.pop();
        }
        Ok(false)
    }

    /// Whether every atom of every lower cover can still get a target atom
    /// whose preimage is just it, given the atoms picked so far.
    fn privacy_reachable(&self, v: usize, per_q: &[Vec<Choice>], picks: &[usize]) -> bool {
        let mu = &self.atom_mu[v];
        let left = mu.len() - picks.len();
        self.covers[v].iter().all(|&i| {
            let k = self.below[v].iter().position(|&x| x == i).unwrap();
            let single = |p: u64| p != 0 && p & (p - 1) == 0;
            let have = picks
                .iter()
                .enumerate()
                .map(|(eta, &c)| per_q[mu[eta]][c].pre[k])
                .filter(|&p| single(p))
                .fold(0u64, |s, p| s | p);
            let full = (1u64 << self.atom_mu[i].len()) - 1;
            let missing = full & !have;
            if missing.count_ones() as usize > left {
                return false;
            }
            let mut can = 0u64;
            let mut last = usize::MAX;
            for &q in &mu[picks.len()..] {
                if q != last {
                    can |= per_q[q].iter().map(|ch| ch.pre[k]).filter(|&p| single(p)).fold(0, |s, p| s | p);
                    last = q;
                }
            }
            missing & !can == 0
        })
    }

    fn assemble(&self) -> SimultEmbedding {
        let verts = self.sys.vertices();
        let targets: Vec<usize> = self.atom_mu.iter().map(|m| m.len()).collect();
        let components = verts
            .iter()
            .enumerate()
            .map(|(v, a)| {
                a.elements()
                    .map(|x| {
                        let mut s = FixedBitSet::with_capacity(targets[v]);
                        for (t, &q) in self.atom_mu[v].iter().enumerate() {
                            if a.leq(self.irr[v][q], x) {
                                s.insert(t);
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let mut transitions = Vec::new();
        for v in 0..verts.len() {
            for (kk, &k) in self.below[v].iter().enumerate() {
                let images = (0..targets[k])
                    .map(|xi| {
                        let mut s = FixedBitSet::with_capacity(targets[v]);
                        for (eta, p) in self.pre[v].iter().enumerate() {
                            if p[kk] >> xi & 1 == 1 {
                                s.insert(eta);
                            }
                        }
                        s
                    })
                    .collect();
                transitions.push(((k, v), BoolMap { src_atoms: targets[k], dst_atoms: targets[v], images }));
            }
        }
        transitions.sort_by_key(|(e, _)| *e);
        SimultEmbedding { targets, components, transitions }
    }
}

/// The embedding `ε(a) = { x : μ(x) ≤ a }` of a distributive lattice into the
/// powerset of `J(A)`, as a single-vertex embedding.
pub fn birkhoff_embedding(a: &Arc<Semilattice>) -> SimultEmbedding {
    let irr = join_irreducibles(a);
    let components = vec![a
        .elements()
        .map(|x| {
            let mut s = FixedBitSet::with_capacity(irr.len());
            for (t, &q) in irr.iter().enumerate() {
                if a.leq(q, x) {
                    s.insert(t);
                }
            }
            s
        })
        .collect()];
    SimultEmbedding { targets: vec![irr.len()], components, transitions: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colimit::Diagram;
    use crate::lattice::{Morphism, Poset};
    use crate::simult::obstruct::build_counterexample;

    fn single(a: Semilattice) -> DirectSystem {
        DirectSystem::from_diagram(Diagram::single(Arc::new(a))).unwrap()
    }

    #[test]
    fn compositions_are_lexicographic() {
        assert_eq!(compositions(2, 3), vec![vec![1, 1], vec![1, 2], vec![2, 1]]);
        assert!(compositions(3, 2).is_empty());
        assert_eq!(compositions(3, 6).len(), 20);
    }

    #[test]
    fn chain_three_embeds_in_two_atoms() {
        let sys = single(Semilattice::chain(3));
        let out = search_simultaneous(&sys, 2).unwrap();
        let se = out.found().expect("found");
        assert_eq!(se.targets, vec![2]);
        let masks: Vec<Vec<usize>> = se.components[0].iter().map(|s| s.ones().collect()).collect();
        assert_eq!(masks, vec![vec![], vec![0], vec![0, 1]]);
        assert!(matches!(search_simultaneous(&sys, 1).unwrap(), SearchOutcome::Exhausted { .. }));
    }

    #[test]
    fn square_is_the_identity() {
        let sys = single(Semilattice::boolean(2));
        let se = search_simultaneous(&sys, 2).unwrap().found().cloned().unwrap();
        assert_eq!(se.targets, vec![2]);
        let fam = mu_family(&sys, &se).unwrap();
        assert!(fam.ok(), "{:?}", fam.violations);
        assert_eq!(fam.mu[0], vec![1, 2]);
    }

    #[test]
    fn pentagon_has_no_embedding() {
        let sys = single(Semilattice::pentagon());
        assert!(matches!(
            search_simultaneous(&sys, 6).unwrap(),
            SearchOutcome::Exhausted { reason: ExhaustReason::NotDistributive(0), .. }
        ));
    }

    #[test]
    fn chain_into_chain_lifts() {
        let two = Arc::new(Semilattice::chain(2));
        let three = Arc::new(Semilattice::chain(3));
        let f = Morphism::new(two.clone(), three.clone(), vec![0, 2]).unwrap();
        let sys = DirectSystem::new(Poset::chain(2), vec![two, three], [((0, 1), f)]).unwrap();
        let se = search_simultaneous(&sys, 3).unwrap().found().cloned().unwrap();
        assert_eq!(se.targets, vec![1, 2]);
        let fam = mu_family(&sys, &se).unwrap();
        assert!(fam.ok(), "{:?}", fam.violations);
    }

    #[test]
    fn non_unital_components_are_normalized() {
        // chain-3 into the middle of 2³: ε(0) = {0}, ε(a) = {0,1}, ε(1) = {0,1,2}
        let sys = single(Semilattice::chain(3));
        let set = |v: &[usize]| {
            let mut s = FixedBitSet::with_capacity(3);
            v.iter().for_each(|&t| s.insert(t));
            s
        };
        let se = SimultEmbedding {
            targets: vec![3],
            components: vec![vec![set(&[0]), set(&[0, 1]), set(&[0, 1, 2])]],
            transitions: Vec::new(),
        };
        let fam = mu_family(&sys, &se).unwrap();
        assert!(fam.ok(), "{:?}", fam.violations);
        assert_eq!(fam.atoms[0], vec![1, 2]);
        assert_eq!(fam.mu[0], vec![1, 2]);
    }

    #[test]
    fn meet_failure_is_reported() {
        // 2² into 2³ by a join embedding that is not a lattice embedding
        let sys = single(Semilattice::boolean(2));
        let set = |v: &[usize]| {
            let mut s = FixedBitSet::with_capacity(3);
            v.iter().for_each(|&t| s.insert(t));
            s
        };
        let se = SimultEmbedding {
            targets: vec![3],
            components: vec![vec![set(&[]), set(&[0, 2]), set(&[1, 2]), set(&[0, 1, 2])]],
            transitions: Vec::new(),
        };
        assert!(matches!(mu_family(&sys, &se), Err(Error::NotMeetPreserving { .. })));
    }

    #[test]
    fn counterexample_is_exhausted() {
        let c = build_counterexample().unwrap();
        let out = search_simultaneous(&c.system, 6).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted { reason: ExhaustReason::Necess { i: 0, .. }, .. }));
    }
}

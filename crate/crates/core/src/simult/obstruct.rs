//! Boundaries `∂^{i,j}`, the necessary condition for simultaneous lattice
//! embeddings, and the square that violates it.

use std::sync::Arc;

use serde::Serialize;

use super::DirectSystem;
use crate::error::{Error, Result};
use crate::lattice::{
    generated_subsemilattice, ideal_lattice, is_distributive, is_isomorphic, join_irreducibles, principal_ideal_index,
    Morphism, Poset, Semilattice,
};

fn transition(sys: &DirectSystem, i: usize, j: usize) -> Result<Morphism> {
    if i >= sys.index().size() || j >= sys.index().size() {
        return Err(Error::IndexOutOfRange { index: i.max(j), size: sys.index().size() });
    }
    if !sys.index().leq(i, j) {
        return Err(Error::IllFormed(format!("{i} is not below {j} in the index")));
    }
    sys.transition(i, j).ok_or_else(|| Error::Internal(format!("missing transition {i}->{j}")))
}

/// The minimal `p ∈ A_i` with `q ≤ f_{i,j}(p)`, in increasing order. Empty
/// when `q ≰ f_{i,j}(1)`.
pub fn boundary(sys: &DirectSystem, i: usize, j: usize, q: usize) -> Result<Vec<usize>> {
    let f = transition(sys, i, j)?;
    let (a, b) = (f.src(), f.dst());
    if q >= b.size() {
        return Err(Error::IndexOutOfRange { index: q, size: b.size() });
    }
    if q == b.zero() || b.lower_covers(q).len() != 1 {
        return Err(Error::NotJoinIrreducible(q));
    }
    let above: Vec<usize> = a.elements().filter(|&p| b.leq(q, f.apply(p))).collect();
    let min: Vec<usize> = above.iter().copied().filter(|&p| !above.iter().any(|&x| a.lt(x, p))).collect();
    let irr = join_irreducibles(a);
    if let Some(&bad) = min.iter().find(|p| !irr.contains(p)) {
        return Err(Error::Internal(format!("boundary element {bad} is not join-irreducible")));
    }
    Ok(min)
}

/// A candidate `q` that fails the necessary condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NecessFailure {
    pub q: usize,
    /// `∂^{i,j}q`; condition (i) asks for `{p}`
    pub boundary: Vec<usize>,
    /// pairs `(k, r)` with `r ∈ ∂^{k,j}q`, `r ≤ f_{i,k}(1)` and `r ≰ f_{i,k}(p)`
    pub violations: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NecessResult {
    Pass(usize),
    /// one entry per candidate `q ∈ J(A_j) ∩ ↓f_{i,j}(p)`
    Fail(Vec<NecessFailure>),
}

impl NecessResult {
    pub fn passed(&self) -> bool {
        matches!(self, NecessResult::Pass(_))
    }
}

/// Looks for `q ≤ f_{i,j}(p)` in `J(A_j)` with `∂^{i,j}q = {p}` and, for
/// every `i ≤ k ≤ j` and `r ∈ ∂^{k,j}q`, `r ≤ f_{i,k}(1) ⟹ r ≤ f_{i,k}(p)`.
/// Returns the least such `q`.
pub fn necess_check(sys: &DirectSystem, i: usize, j: usize, p: usize) -> Result<NecessResult> {
    let f = transition(sys, i, j)?;
    let a = f.src();
    if p >= a.size() {
        return Err(Error::IndexOutOfRange { index: p, size: a.size() });
    }
    if p == a.zero() || a.lower_covers(p).len() != 1 {
        return Err(Error::NotJoinIrreducible(p));
    }
    let b = f.dst();
    let between: Vec<usize> =
        sys.index().linear_extension().into_iter().filter(|&k| sys.index().leq(i, k) && sys.index().leq(k, j)).collect();
    let mut failures = Vec::new();
    for q in join_irreducibles(b).into_iter().filter(|&q| b.leq(q, f.apply(p))) {
        let bd = boundary(sys, i, j, q)?;
        let mut violations = Vec::new();
        for &k in &between {
            let fik = transition(sys, i, k)?;
            let ak = fik.dst();
            let (top, pk) = (fik.apply(a.top()), fik.apply(p));
            for r in boundary(sys, k, j, q)? {
                if ak.leq(r, top) && !ak.leq(r, pk) {
                    violations.push((k, r));
                }
            }
        }
        if bd == [p] && violations.is_empty() {
            return Ok(NecessResult::Pass(q));
        }
        failures.push(NecessFailure { q, boundary: bd, violations });
    }
    Ok(NecessResult::Fail(failures))
}

/// Runs [`necess_check`] over every `i < j` and every `p ∈ J(A_i)`; returns
/// the first failure as `(i, j, p, failures)`.
/// `(i, j, p, failures)` for the first failing triple.
pub type NecessWitness = (usize, usize, usize, Vec<NecessFailure>);

pub fn first_necess_failure(sys: &DirectSystem) -> Result<Option<NecessWitness>> {
    for ((i, j), f) in sys.transitions() {
        for p in join_irreducibles(f.src()) {
            if let NecessResult::Fail(w) = necess_check(sys, i, j, p)? {
                return Ok(Some((i, j, p, w)));
            }
        }
    }
    Ok(None)
}

/// Named elements of the counterexample square, as indices into `A`.
#[derive(Clone, Debug, Serialize)]
pub struct SquareElements {
    pub p1: usize,
    pub p2: usize,
    pub q1: usize,
    pub q2: usize,
    pub q1p: usize,
    pub q2p: usize,
    pub p: usize,
    pub r1: usize,
    pub r2: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Constraint {
    pub name: &'static str,
    pub holds: bool,
}

/// The square `S ⊆ A₁, A₂ ⊆ A` with index `0 = S`, `1 = A₁`, `2 = A₂`, `3 = A`.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub system: DirectSystem,
    /// the poset `P` on `p₁, p₂, q₁, q₂, q₁′, q₂′` (indices 0..6 in that order)
    pub poset: Poset,
    /// names in `A`
    pub elements: SquareElements,
    /// `elements_in[v]` maps an element of `A` to its index in vertex `v`, if present
    pub elements_in: Vec<Vec<Option<usize>>>,
    pub constraints: Vec<Constraint>,
}

impl Counterexample {
    /// Index of `x ∈ A` inside vertex `v`.
    pub fn at(&self, v: usize, x: usize) -> usize {
        self.elements_in[v][x].expect("element lies in the vertex")
    }
}

pub const SQUARE_S: usize = 0;
pub const SQUARE_A1: usize = 1;
pub const SQUARE_A2: usize = 2;
pub const SQUARE_A: usize = 3;

fn positions(incl: &Morphism) -> Vec<Option<usize>> {
    let mut pos = vec![None; incl.dst().size()];
    for (i, &x) in incl.map().iter().enumerate() {
        pos[x] = Some(i);
    }
    pos
}

fn inclusion(from: &Morphism, to: &Morphism) -> Result<Morphism> {
    let pos = positions(to);
    let map = from
        .map()
        .iter()
        .map(|&x| pos[x].ok_or_else(|| Error::Internal("vertex is not contained in its successor".into())))
        .collect::<Result<Vec<_>>>()?;
    Morphism::new(from.src().clone(), to.src().clone(), map)
}

/// Induced subposet of `A` on `elems`.
fn induced(a: &Semilattice, elems: &[usize]) -> Result<Poset> {
    let mut rel = Vec::new();
    for (x, &u) in elems.iter().enumerate() {
        for (y, &v) in elems.iter().enumerate() {
            if x != y && a.leq(u, v) {
                rel.push((x, y));
            }
        }
    }
    Poset::new(elems.len(), &rel)
}

/// Builds the square and checks every constraint the construction relies on;
/// a failed constraint aborts with its name.
pub fn build_counterexample() -> Result<Counterexample> {
    let (p1, p2, q1, q2, q1p, q2p) = (0, 1, 2, 3, 4, 5);
    let poset = Poset::new(6, &[(q1, p1), (q2, p1), (q1, p2), (q2, p2), (q1p, p1), (q2p, p2)])?;
    let a = Arc::new(ideal_lattice(&poset));
    let el = |x| principal_ideal_index(&poset, &a, x);
    let (e1, e2, f1, f2, f1p, f2p) = (el(p1), el(p2), el(q1), el(q2), el(q1p), el(q2p));
    let p = a.meet(e1, e2);
    let (r1, r2) = (a.join(f1, f1p), a.join(f2, f2p));
    let elements = SquareElements { p1: e1, p2: e2, q1: f1, q2: f2, q1p: f1p, q2p: f2p, p, r1, r2 };

    let (s, s_in) = generated_subsemilattice(&a, &[p, e1, e2])?;
    let (a1, a1_in) = generated_subsemilattice(&a, &[p, e1, e2, r1])?;
    let (a2, a2_in) = generated_subsemilattice(&a, &[p, e1, e2, r2])?;
    let a_id = Morphism::identity(a.clone());

    let sorted = |mut v: Vec<usize>| {
        v.sort_unstable();
        v
    };
    let ja = sorted(join_irreducibles(&a).into_iter().collect());
    let principal = sorted(vec![e1, e2, f1, f2, f1p, f2p]);
    let js = sorted(join_irreducibles(&s).iter().map(|&x| s_in.apply(x)).collect());
    let p_sets = [(e1, r1, e2, &a1, &a1_in), (e2, r2, e1, &a2, &a2_in)];
    let only_pairs = p_sets.iter().all(|&(pi, ri, pj, _, _)| {
        let elems = [p, pi, pj, ri];
        let strict: Vec<(usize, usize)> = (0..4)
            .flat_map(|x| (0..4).map(move |y| (x, y)))
            .filter(|&(x, y)| x != y && a.leq(elems[x], elems[y]))
            .collect();
        strict == [(0, 1), (0, 2), (3, 1)]
    });
    let ideals_match = p_sets.iter().all(|&(pi, ri, pj, ai, _)| {
        induced(&a, &[p, pi, pj, ri]).map(|q| {
            let il = ideal_lattice(&q);
            il.size() == 8 && ai.size() == 8 && is_isomorphic(&il, ai)
        }) == Ok(true)
    });
    let constraints = vec![
        Constraint { name: "1 = p1 v p2", holds: a.join(e1, e2) == a.top() },
        Constraint { name: "p = p1 ^ p2 = q1 v q2", holds: p == a.join(f1, f2) },
        Constraint { name: "P = J(A)", holds: ja == principal },
        Constraint { name: "J(S) = {p, p1, p2}", holds: js == sorted(vec![p, e1, e2]) },
        Constraint { name: "r_i < p_i", holds: a.lt(r1, e1) && a.lt(r2, e2) },
        Constraint {
            name: "p_i not below r_i v p_j",
            holds: !a.leq(e1, a.join(r1, e2)) && !a.leq(e2, a.join(r2, e1)),
        },
        Constraint { name: "P_i has only r_i < p_i and p < p1, p2", holds: only_pairs },
        Constraint { name: "A_i is the ideal lattice of P_i, of size 8", holds: ideals_match },
        Constraint { name: "A_1, A_2 distributive", holds: is_distributive(&a1) && is_distributive(&a2) },
    ];
    if let Some(c) = constraints.iter().find(|c| !c.holds) {
        return Err(Error::IllFormed(format!("counterexample constraint failed: {}", c.name)));
    }

    let index = Poset::new(4, &[(SQUARE_S, SQUARE_A1), (SQUARE_S, SQUARE_A2), (SQUARE_A1, SQUARE_A), (SQUARE_A2, SQUARE_A)])?;
    let arrows = vec![
        ((SQUARE_S, SQUARE_A1), inclusion(&s_in, &a1_in)?),
        ((SQUARE_S, SQUARE_A2), inclusion(&s_in, &a2_in)?),
        ((SQUARE_A1, SQUARE_A), a1_in.clone()),
        ((SQUARE_A2, SQUARE_A), a2_in.clone()),
    ];
    if arrows.iter().any(|(_, f)| !f.flags().preserves_unit) {
        return Err(Error::IllFormed("counterexample transitions do not preserve the unit".into()));
    }
    let system = DirectSystem::new(index, vec![s, a1, a2, a.clone()], arrows)?;
    let elements_in = vec![positions(&s_in), positions(&a1_in), positions(&a2_in), positions(&a_id)];
    Ok(Counterexample { system, poset, elements, elements_in, constraints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Semilattice;

    fn two_into_three() -> DirectSystem {
        let two = Arc::new(Semilattice::chain(2));
        let three = Arc::new(Semilattice::chain(3));
        let f = Morphism::new(two.clone(), three.clone(), vec![0, 2]).unwrap();
        DirectSystem::new(Poset::chain(2), vec![two, three], [((0, 1), f)]).unwrap()
    }

    #[test]
    fn boundary_on_the_diagonal_is_the_element() {
        let sys = two_into_three();
        assert_eq!(boundary(&sys, 1, 1, 1).unwrap(), vec![1]);
        assert_eq!(boundary(&sys, 1, 1, 0).unwrap_err(), Error::NotJoinIrreducible(0));
        assert_eq!(boundary(&sys, 0, 1, 2).unwrap(), vec![1]);
        assert_eq!(boundary(&sys, 0, 1, 1).unwrap(), vec![1]);
    }

    #[test]
    fn chain_extension_passes() {
        let sys = two_into_three();
        assert_eq!(necess_check(&sys, 0, 1, 1).unwrap(), NecessResult::Pass(1));
        let single = DirectSystem::from_diagram(crate::colimit::Diagram::single(Arc::new(Semilattice::chain(4)))).unwrap();
        for p in 1..4 {
            assert_eq!(necess_check(&single, 0, 0, p).unwrap(), NecessResult::Pass(p));
        }
    }

    #[test]
    fn square_constraints_and_sizes() {
        let c = build_counterexample().unwrap();
        assert_eq!(c.constraints.len(), 9);
        assert!(c.constraints.iter().all(|k| k.holds));
        let sizes: Vec<usize> = c.system.vertices().iter().map(|v| v.size()).collect();
        assert_eq!(sizes, vec![5, 8, 8, 21]);
        assert_eq!(join_irreducibles(&c.system.vertices()[SQUARE_A]).len(), 6);
    }

    #[test]
    fn square_boundaries() {
        let c = build_counterexample().unwrap();
        let e = &c.elements;
        let q1 = c.at(SQUARE_A, e.q1);
        assert_eq!(boundary(&c.system, SQUARE_S, SQUARE_A, q1).unwrap(), vec![c.at(SQUARE_S, e.p)]);
        let mut want = vec![c.at(SQUARE_A1, e.p), c.at(SQUARE_A1, e.r1)];
        want.sort_unstable();
        assert_eq!(boundary(&c.system, SQUARE_A1, SQUARE_A, q1).unwrap(), want);
        assert_eq!(boundary(&c.system, SQUARE_A2, SQUARE_A, q1).unwrap(), vec![c.at(SQUARE_A2, e.p)]);
    }

    #[test]
    fn square_fails_the_necessary_condition() {
        let c = build_counterexample().unwrap();
        let e = &c.elements;
        let res = necess_check(&c.system, SQUARE_S, SQUARE_A, c.at(SQUARE_S, e.p)).unwrap();
        let NecessResult::Fail(fails) = res else { panic!("expected failure") };
        let got: Vec<(usize, Vec<(usize, usize)>)> = fails.iter().map(|f| (f.q, f.violations.clone())).collect();
        let mut want = vec![
            (c.at(SQUARE_A, e.q1), vec![(SQUARE_A1, c.at(SQUARE_A1, e.r1))]),
            (c.at(SQUARE_A, e.q2), vec![(SQUARE_A2, c.at(SQUARE_A2, e.r2))]),
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(fails.iter().all(|f| f.boundary == [c.at(SQUARE_S, e.p)]));
        // p1 and p2 pass on their own
        for x in [e.p1, e.p2] {
            assert!(necess_check(&c.system, SQUARE_S, SQUARE_A, c.at(SQUARE_S, x)).unwrap().passed());
        }
    }
}

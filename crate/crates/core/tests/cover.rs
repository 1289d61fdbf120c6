mod common;

use boolcover::cover::{build_rho, CoverStore};
use boolcover::lattice::{is_isomorphic, Semilattice};
use common::{arc, colimit_by_duality};

#[test]
fn phi_star_matches_the_dual_enumeration() {
    let store = CoverStore::new();
    for (s, size, atoms) in [
        (Semilattice::chain(2), 2, 1),
        (Semilattice::chain(3), 3, 2),
        (Semilattice::chain(4), 12, 6),
        (Semilattice::boolean(2), 9, 5),
    ] {
        let s = arc(s);
        let p = store.phi_object(&s).unwrap();
        let d = build_rho(&s, &store).unwrap().to_diagram().unwrap();
        let oracle = colimit_by_duality(&d);
        assert_eq!(oracle.size(), size);
        assert_eq!((p.entry.phi_star_size, p.atoms()), (size, atoms));
        assert!(is_isomorphic(&oracle, &p.entry.star.as_ref().unwrap().table));
    }
}

/// Cutting `Φ(Y)` down to `[b_Y, 1]` and acting by `x ↦ Φ(f)(x) ∨ b_Y` keeps
/// the squares but can identify atoms: here three atoms of `Φ(chain-4)` are
/// covered by the others once `b_Y` is removed.
#[test]
fn trimmed_action_can_lose_injectivity() {
    use boolcover::cover::{phi_morphism, trimmed_morphism};
    use boolcover::lattice::Morphism;
    use boolcover::workbench::check_trimmed;

    let store = CoverStore::new();
    // 0 < 1 < {2, 3} < 4
    let y = arc(Semilattice::from_order(5, 0, |a, b| a == b || a == 0 || b == 4 || (a == 1 && b != 0)).unwrap());
    let f = Morphism::new(arc(Semilattice::chain(4)), y, vec![0, 1, 2, 4]).unwrap();
    assert!(phi_morphism(&f, &store).unwrap().is_embedding());
    assert!(!trimmed_morphism(&f, &store).unwrap().is_embedding());
    let err = check_trimmed(&f, &store).unwrap_err().to_string();
    assert!(err.contains("not an embedding"), "{err}");
}

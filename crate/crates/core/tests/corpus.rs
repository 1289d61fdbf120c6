use std::collections::BTreeSet;

use boolcover::workbench::enumerate_semilattices;

/// Strict orders on `m` points compatible with the labeling (`x < y` only
/// when `x < y` as integers), as bit matrices.
fn natural_posets(m: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|x| (x + 1..m).map(move |y| (x, y))).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut lt = vec![vec![false; m]; m];
        for (b, &(x, y)) in pairs.iter().enumerate() {
            lt[x][y] = mask >> b & 1 == 1;
        }
        let transitive = (0..m).all(|x| (0..m).all(|y| (0..m).all(|z| !(lt[x][y] && lt[y][z]) || lt[x][z])));
        if transitive {
            out.push(lt);
        }
    }
    out
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, m - 1);
            out.push(q);
        }
    }
    out
}

/// Lattices on `n` elements up to isomorphism: bounded posets whose middle
/// is any naturally labeled poset, where every pair has a least upper bound,
/// deduplicated by the least relabeled relation matrix.
fn brute_lattice_count(n: usize) -> usize {
    if n <= 2 {
        return 1;
    }
    let m = n - 2;
    let perms = permutations(m);
    let mut seen = BTreeSet::new();
    for lt in natural_posets(m) {
        // bottom m, top m + 1
        let leq = |x: usize, y: usize| x == y || x == m || y == m + 1 || (x < m && y < m && lt[x][y]);
        let lattice = (0..n).all(|x| {
            (0..n).all(|y| {
                let ubs: Vec<usize> = (0..n).filter(|&u| leq(x, u) && leq(y, u)).collect();
                ubs.iter().any(|&u| ubs.iter().all(|&v| leq(u, v)))
            })
        });
        if !lattice {
            continue;
        }
        let key = perms
            .iter()
            .map(|p| {
                let mut bits = Vec::with_capacity(m * m);
                for x in 0..m {
                    for y in 0..m {
                        bits.push(lt[p[x]][p[y]]);
                    }
                }
                bits
            })
            .min()
            .unwrap();
        seen.insert(key);
    }
    seen.len()
}

#[test]
fn oracle_counts_are_the_known_sequence() {
    let counts: Vec<usize> = (1..=7).map(brute_lattice_count).collect();
    assert_eq!(counts, vec![1, 1, 1, 2, 5, 15, 53]);
}

#[test]
fn corpus_matches_the_brute_force_count() {
    let corpus = enumerate_semilattices(7).unwrap();
    let expected: Vec<usize> = (1..=7).map(brute_lattice_count).collect();
    assert_eq!(corpus.counts(), expected);
    let keys: BTreeSet<&str> = corpus.members.iter().map(|m| m.key.as_str()).collect();
    assert_eq!(keys.len(), corpus.members.len());
    assert!(corpus.members.iter().all(|m| m.semilattice.elements().all(|x| m.semilattice.leq(x, m.semilattice.top()))));
}

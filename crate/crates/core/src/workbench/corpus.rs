use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{canonical_form, canonical_key, classify, Classification, Semilattice, SemilatticeRecord};

/// Largest size [`enumerate_semilattices`] accepts.
pub const CORPUS_CAP: usize = 7;

#[derive(Clone, Debug)]
pub struct CorpusMember {
    /// canonical form
    pub semilattice: Arc<Semilattice>,
    pub key: String,
    pub flags: Classification,
}

/// Every finite ⟨∨,0⟩-semilattice with at most `max_size` elements, one
/// canonical representative per isomorphism class, ordered by size then key.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub max_size: usize,
    pub members: Vec<CorpusMember>,
}

impl Corpus {
    pub fn of_size(&self, n: usize) -> impl Iterator<Item = &CorpusMember> {
        self.members.iter().filter(move |m| m.semilattice.size() == n)
    }

    pub fn up_to(&self, n: usize) -> impl Iterator<Item = &CorpusMember> {
        self.members.iter().filter(move |m| m.semilattice.size() <= n)
    }

    pub fn counts(&self) -> Vec<usize> {
        (1..=self.max_size).map(|n| self.of_size(n).count()).collect()
    }

    pub fn to_record(&self) -> CorpusRecord {
        CorpusRecord {
            max_size: self.max_size,
            members: self
                .members
                .iter()
                .map(|m| CorpusMemberRecord { key: m.key.clone(), flags: m.flags, semilattice: m.semilattice.to_record() })
                .collect(),
        }
    }

    pub fn from_record(r: &CorpusRecord) -> Result<Self> {
        let members = r
            .members
            .iter()
            .map(|m| {
                let s = Arc::new(Semilattice::from_record(&m.semilattice)?);
                if canonical_key(&s) != m.key {
                    return Err(Error::IllFormed(format!("corpus member {} is not in canonical form", m.key)));
                }
                Ok(CorpusMember { flags: classify(&s), semilattice: s, key: m.key.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Corpus { max_size: r.max_size, members })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMemberRecord {
    pub key: String,
    pub flags: Classification,
    pub semilattice: SemilatticeRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub max_size: usize,
    pub members: Vec<CorpusMemberRecord>,
}

/// Every lattice `L` with `|L| ≥ 3` arises from `L ∖ {c}`, `c` a coatom, by
/// adding a new element under the top whose strict down-set is a down-set
/// containing zero; each level is generated this way from the previous one.
pub fn enumerate_semilattices(n: usize) -> Result<Corpus> {
    if n > CORPUS_CAP {
        return Err(Error::SizeCapExceeded { what: "corpus size".into(), needed: n as u128, cap: CORPUS_CAP as u128 });
    }
    let mut levels: Vec<BTreeMap<String, Arc<Semilattice>>> = Vec::new();
    for m in 1..=n {
        let mut level = BTreeMap::new();
        if m <= 2 {
            let (c, _) = canonical_form(&Arc::new(Semilattice::chain(m)))?;
            level.insert(canonical_key(&c), c);
        } else {
            for base in levels[m - 2].values() {
                for s in add_coatom(base)? {
                    let (c, _) = canonical_form(&Arc::new(s))?;
                    level.entry(canonical_key(&c)).or_insert(c);
                }
            }
        }
        levels.push(level);
    }
    let members = levels
        .into_iter()
        .flat_map(|l| l.into_iter())
        .map(|(key, s)| CorpusMember { flags: classify(&s), semilattice: s, key })
        .collect();
    Ok(Corpus { max_size: n, members })
}

/// All lattices obtained from `base` by one new coatom.
fn add_coatom(base: &Semilattice) -> Result<Vec<Semilattice>> {
    let m = base.size();
    let top = base.top();
    let rest: Vec<usize> = base.elements().filter(|&x| x != top).collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << rest.len() {
        let inside = |x: usize| rest.iter().position(|&r| r == x).is_some_and(|p| mask >> p & 1 == 1);
        if !inside(base.zero()) {
            continue;
        }
        let closed = rest.iter().all(|&x| !inside(x) || rest.iter().all(|&y| !base.leq(y, x) || inside(y)));
        if !closed {
            continue;
        }
        let c = m;
        let leq = |x: usize, y: usize| match (x == c, y == c) {
            (true, true) => true,
            (true, false) => y == top,
            (false, true) => inside(x),
            (false, false) => base.leq(x, y),
        };
        match Semilattice::from_order(m + 1, base.zero(), leq) {
            Ok(s) => out.push(s),
            Err(Error::NoJoin { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_up_to_six() {
        let c = enumerate_semilattices(6).unwrap();
        assert_eq!(c.counts(), vec![1, 1, 1, 2, 5, 15]);
        let four: Vec<bool> = c.of_size(4).map(|m| m.flags.boolean).collect();
        assert_eq!(four.iter().filter(|&&b| b).count(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_semilattices(8), Err(Error::SizeCapExceeded { .. })));
    }

    #[test]
    fn record_roundtrip_is_byte_identical() {
        let c = enumerate_semilattices(5).unwrap();
        let a = serde_json::to_string(&c.to_record()).unwrap();
        let back = Corpus::from_record(&serde_json::from_str(&a).unwrap()).unwrap();
        assert_eq!(serde_json::to_string(&back.to_record()).unwrap(), a);
        assert_eq!(serde_json::to_string(&enumerate_semilattices(5).unwrap().to_record()).unwrap(), a);
    }
}

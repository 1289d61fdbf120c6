use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::colimit::{Diagram, DiagramRecord};
use crate::error::{Error, Result};
use crate::lattice::{Morphism, MorphismRecord, Semilattice, SemilatticeRecord};
use crate::simult::{DirectSystem, DirectSystemRecord};

/// A morphism together with the semilattices its `src` and `dst` name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDocument {
    pub semilattices: BTreeMap<String, SemilatticeRecord>,
    pub morphism: MorphismRecord,
}

impl MorphismDocument {
    pub fn resolve(&self) -> Result<Morphism> {
        let get = |name: &str| -> Result<Arc<Semilattice>> {
            let r = self
                .semilattices
                .get(name)
                .ok_or_else(|| Error::IllFormed(format!("morphism names unknown semilattice {name:?}")))?;
            Ok(Arc::new(Semilattice::from_record(r)?))
        };
        Morphism::new(get(&self.morphism.src)?, get(&self.morphism.dst)?, self.morphism.map.clone())
    }
}

/// Any JSON input of the command line; variants are tried in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Document {
    System(DirectSystemRecord),
    Diagram(DiagramRecord),
    Morphism(MorphismDocument),
    Semilattice(SemilatticeRecord),
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::IllFormed(format!("unrecognized document: {e}")))
    }

    pub fn semilattice(&self) -> Result<Arc<Semilattice>> {
        match self {
            Document::Semilattice(r) => Ok(Arc::new(Semilattice::from_record(r)?)),
            _ => Err(Error::IllFormed("expected a semilattice document".into())),
        }
    }

    pub fn morphism(&self) -> Result<Morphism> {
        match self {
            Document::Morphism(m) => m.resolve(),
            _ => Err(Error::IllFormed("expected a morphism document".into())),
        }
    }

    /// A direct system is also accepted as a diagram.
    pub fn diagram(&self) -> Result<Diagram> {
        match self {
            Document::Diagram(r) => Diagram::from_record(r),
            Document::System(r) => Diagram::from_record(&r.diagram),
            _ => Err(Error::IllFormed("expected a diagram document".into())),
        }
    }

    pub fn system(&self) -> Result<DirectSystem> {
        match self {
            Document::System(r) => DirectSystem::from_record(r),
            _ => Err(Error::IllFormed("expected a direct system document".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simult::build_counterexample;

    #[test]
    fn variants_are_distinguished() {
        let c2 = Semilattice::chain(2).to_record();
        let s = Document::parse(&serde_json::to_string(&c2).unwrap()).unwrap();
        assert!(matches!(s, Document::Semilattice(_)));

        let m = MorphismDocument {
            semilattices: [("a".to_string(), c2.clone()), ("b".to_string(), Semilattice::chain(3).to_record())].into(),
            morphism: MorphismRecord { src: "a".into(), dst: "b".into(), map: vec![0, 2] },
        };
        let d = Document::parse(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(d.morphism().unwrap().map(), &[0, 2]);

        let sys = build_counterexample().unwrap().system.to_record();
        let text = serde_json::to_string(&sys).unwrap();
        assert!(matches!(Document::parse(&text).unwrap(), Document::System(_)));
        let diag = Document::parse(&serde_json::to_string(&sys.diagram).unwrap()).unwrap();
        assert!(matches!(diag, Document::Diagram(_)));
        assert_eq!(diag.diagram().unwrap().vertices().len(), 4);
    }

    #[test]
    fn garbage_is_ill_formed() {
        assert!(matches!(Document::parse("{\"x\": 1}"), Err(Error::IllFormed(_))));
    }
}

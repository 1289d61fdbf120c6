use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::colimit::{Diagram, DiagramRecord};
use crate::error::{Error, Result};
use crate::lattice::{Morphism, Poset, Semilattice};

/// A poset-indexed diagram whose transitions are all embeddings.
#[derive(Clone, Debug)]
pub struct DirectSystem {
    diagram: Diagram,
}

impl DirectSystem {
    pub fn new(
        index: Poset,
        vertices: Vec<Arc<Semilattice>>,
        transitions: impl IntoIterator<Item = ((usize, usize), Morphism)>,
    ) -> Result<Self> {
        Self::from_diagram(Diagram::new(index, vertices, transitions)?)
    }

    pub fn from_diagram(diagram: Diagram) -> Result<Self> {
        if diagram.arrows().any(|(_, f)| !f.is_embedding()) {
            return Err(Error::NotEmbedding);
        }
        Ok(DirectSystem { diagram })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn index(&self) -> &Poset {
        self.diagram.index()
    }

    pub fn vertices(&self) -> &[Arc<Semilattice>] {
        self.diagram.vertices()
    }

    /// `f_{i,j}`, the identity when `i == j`.
    pub fn transition(&self, i: usize, j: usize) -> Option<Morphism> {
        self.diagram.arrow(i, j)
    }

    /// All non-identity transitions.
    pub fn transitions(&self) -> impl Iterator<Item = ((usize, usize), &Morphism)> {
        self.diagram.arrows()
    }

    pub fn to_record(&self) -> DirectSystemRecord {
        DirectSystemRecord { diagram: self.diagram.to_record(), embeddings: true }
    }

    pub fn from_record(r: &DirectSystemRecord) -> Result<Self> {
        Self::from_diagram(Diagram::from_record(&r.diagram)?)
    }
}

/// JSON shape: a diagram record with an `"embeddings": true` marker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectSystemRecord {
    #[serde(flatten)]
    pub diagram: DiagramRecord,
    pub embeddings: bool,
}

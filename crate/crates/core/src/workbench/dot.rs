use std::fmt::Write;

use crate::colimit::Diagram;
use crate::lattice::{join_irreducibles, Morphism, Semilattice};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Nodes and cover edges of one semilattice; node ids are `{prefix}{x}`.
fn hasse(out: &mut String, s: &Semilattice, prefix: &str, indent: &str) {
    let irr = join_irreducibles(s);
    for x in s.elements() {
        let style = if irr.contains(&x) { ", style=filled, fillcolor=lightblue" } else { "" };
        let _ = writeln!(out, "{indent}{prefix}{x} [label=\"{}\"{style}];", escape(&s.label(x)));
    }
    for (x, y) in s.cover_pairs() {
        let _ = writeln!(out, "{indent}{prefix}{x} -> {prefix}{y};");
    }
}

/// Hasse diagram, bottom to top, with join-irreducibles filled.
pub fn dot_semilattice(s: &Semilattice) -> String {
    let mut out = String::from("digraph semilattice {\n  rankdir=BT;\n  node [shape=circle];\n");
    hasse(&mut out, s, "n", "  ");
    out.push_str("}\n");
    out
}

/// Source and target as clusters, the map as dashed cross-edges.
pub fn dot_morphism(f: &Morphism) -> String {
    let mut out = String::from("digraph morphism {\n  rankdir=BT;\n  compound=true;\n  node [shape=circle];\n");
    for (c, s) in [(0, f.src()), (1, f.dst())] {
        let _ = writeln!(out, "  subgraph cluster_{c} {{\n    label=\"{}\";", if c == 0 { "source" } else { "target" });
        hasse(&mut out, s, &format!("v{c}_"), "    ");
        out.push_str("  }\n");
    }
    for (x, &y) in f.map().iter().enumerate() {
        let _ = writeln!(out, "  v0_{x} -> v1_{y} [style=dashed, constraint=false];");
    }
    out.push_str("}\n");
    out
}

/// One cluster per vertex, cover arrows of the index as dashed cross-edges.
pub fn dot_diagram(d: &Diagram) -> String {
    let mut out = String::from("digraph diagram {\n  rankdir=BT;\n  compound=true;\n  node [shape=circle];\n");
    for (v, s) in d.vertices().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{v} {{\n    label=\"{v}\";");
        hasse(&mut out, s, &format!("v{v}_"), "    ");
        out.push_str("  }\n");
    }
    for &(i, j) in d.index().covers() {
        let f = d.arrow(i, j).expect("cover arrows exist");
        for (x, &y) in f.map().iter().enumerate() {
            let _ = writeln!(out, "  v{i}_{x} -> v{j}_{y} [style=dashed, constraint=false];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn two_has_one_edge() {
        let d = dot_semilattice(&Semilattice::chain(2));
        assert_eq!(d.matches(" -> ").count(), 1);
        assert_eq!(d.matches("[label=").count(), 2);
    }

    #[test]
    fn embedding_has_dashed_edges_per_element() {
        let c3 = Arc::new(Semilattice::chain(3));
        let sq = Arc::new(Semilattice::boolean(2));
        let f = Morphism::new(c3, sq, vec![0, 1, 3]).unwrap();
        let d = dot_morphism(&f);
        assert_eq!(d.matches("style=dashed").count(), 3);
        assert_eq!(d.matches("subgraph cluster_").count(), 2);
        assert_eq!(d, dot_morphism(&f));
    }
}

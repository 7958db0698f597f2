use std::fmt::Write;

use super::{NodeRef, ObddManager};

/// Graphviz rendering of the DAG below `f`: solid hi-edges, dashed lo-edges.
pub fn to_dot(manager: &ObddManager, f: NodeRef) -> String {
    let mut out = String::from("digraph obdd {\n");
    out.push_str("  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n");
    for g in manager.reachable(f) {
        let var = manager.var(g).expect("internal node");
        writeln!(out, "  n{} [label=\"{}\"];", g.index(), var).unwrap();
        writeln!(out, "  n{} -> n{} [style=dashed];", g.index(), manager.lo(g).index()).unwrap();
        writeln!(out, "  n{} -> n{};", g.index(), manager.hi(g).index()).unwrap();
    }
    out.push_str("}\n");
    out
}

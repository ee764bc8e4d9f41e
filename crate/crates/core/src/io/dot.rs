use std::fmt::Write;

use crate::graph::ReebGraph;
use crate::interleave::Labeling;

/// A DOT digraph with edges pointing upward. Each edge carries its index as
/// a key so parallel edges stay distinct.
pub fn export_dot(graph: &ReebGraph, labeling: Option<&Labeling>) -> String {
    let mut out = String::from("digraph reeb {\n  rankdir=BT;\n  node [shape=circle];\n");
    for v in graph.nodes() {
        let mut label = format!("{}\\nf={}", escape(graph.name(v)), graph.value(v));
        if let Some(l) = labeling {
            let labels = l.labels_of(v);
            if !labels.is_empty() {
                let list: Vec<String> = labels.iter().map(usize::to_string).collect();
                let _ = write!(label, "\\nlabels={}", list.join(","));
            }
        }
        let _ = writeln!(out, "  n{} [label=\"{label}\", f=\"{}\"];", v.0, graph.value(v));
    }
    for e in graph.edge_ids() {
        let (lo, hi) = graph.oriented(e);
        let _ = writeln!(out, "  n{} -> n{} [key=e{}];", lo.0, hi.0, e.0);
    }
    for &(j, s) in graph.superpositions() {
        let _ = writeln!(out, "  {{ rank=same; n{}; n{}; }}", j.0, s.0);
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    #[test]
    fn loop_edges_are_distinct() {
        let mut b = GraphBuilder::new();
        let s = b.node("s", 0);
        let j = b.node("j", 2);
        b.edge(j, s).edge(s, j);
        let g = b.build().unwrap();
        let dot = export_dot(&g, Some(&Labeling::new(vec![s])));
        assert!(dot.contains("n0 -> n1 [key=e0]"));
        assert!(dot.contains("n0 -> n1 [key=e1]"));
        assert!(dot.contains("labels=1"));
    }
}

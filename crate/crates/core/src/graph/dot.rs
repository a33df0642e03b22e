use std::fmt::Write;

use super::{ContextGraph, EdgeKind, Valuation};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Implication edges are labelled with their grade,
/// structural links are dashed and labelled `0`, `1` or `2`. Vertices the
/// valuation defines are labelled `"name (grade)"`.
pub fn export_dot(g: &ContextGraph, valuation: Option<&Valuation>) -> String {
    if g.is_empty() {
        return "digraph {}\n".to_string();
    }
    let mut out = String::from("digraph {\n");
    for v in g.vertices_by_label() {
        let name = escape(g.label(v));
        match valuation.and_then(|val| val.get(v)) {
            Some(l) => writeln!(out, "  \"{name}\" [label=\"{name} ({l})\"];"),
            None => writeln!(out, "  \"{name}\";"),
        }
        .expect("writing to a String");
    }
    let mut edges: Vec<_> = g.edges().collect();
    edges.sort_by(|a, b| {
        (g.label(a.src), g.label(a.dst), a.kind).cmp(&(g.label(b.src), g.label(b.dst), b.kind))
    });
    for e in edges {
        let (src, dst) = (escape(g.label(e.src)), escape(g.label(e.dst)));
        let attrs = match (e.kind, e.value) {
            (EdgeKind::Implication, Some(l)) => format!("label=\"{l}\""),
            (EdgeKind::Is0, _) => "label=\"0\", style=dashed".to_string(),
            (EdgeKind::Subj1, _) => "label=\"1\", style=dashed".to_string(),
            (EdgeKind::Obj2, _) => "label=\"2\", style=dashed".to_string(),
            (EdgeKind::Implication, None) => unreachable!("implications carry a grade"),
        };
        writeln!(out, "  \"{src}\" -> \"{dst}\" [{attrs}];").expect("writing to a String");
    }
    out.push_str("}\n");
    out
}

//! Graphviz export.

use std::fmt::Write;

use tgame::{AgentSet, Network};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A `digraph` with weights as edge labels; agents in `highlight` are
/// filled yellow.
pub fn to_dot(net: &Network, highlight: Option<&AgentSet>) -> String {
    let mut s = String::from("digraph G {\n  node [shape=circle];\n");
    for i in net.agents() {
        let fill = match highlight {
            Some(h) if h.contains(&i) => ", style=filled, fillcolor=yellow",
            _ => "",
        };
        writeln!(s, "  {} [label={}{}];", quote(net.label(i)), quote(net.label(i)), fill).unwrap();
    }
    let mut edges: Vec<_> = net.edges().collect();
    edges.sort_by_key(|(a, b, _)| (*a, *b));
    for (a, b, w) in edges {
        writeln!(
            s,
            "  {} -> {} [label={}];",
            quote(net.label(a)),
            quote(net.label(b)),
            quote(&w.to_string())
        )
        .unwrap();
    }
    s.push_str("}\n");
    s
}

//! Graphviz export.

use std::fmt::Write;

use crate::automaton::Automaton;

/// DOT rendering: marked states double-circled, uncontrollable edges dashed,
/// parallel edges between the same pair of states merged into one label.
pub fn to_dot(a: &Automaton) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(a.name())).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    if let Some(q0) = a.initial() {
        writeln!(out, "  __init [shape=point];").unwrap();
        writeln!(out, "  __init -> {};", quote(a.state_name(q0))).unwrap();
    }
    for (q, name) in a.states().iter().enumerate() {
        if a.is_marked(q) {
            writeln!(out, "  {} [shape=doublecircle];", quote(name)).unwrap();
        } else {
            writeln!(out, "  {};", quote(name)).unwrap();
        }
    }
    // group by (from, to, controllable) keeping first-seen order
    type Key = (usize, usize, bool);
    let mut edges: Vec<(Key, Vec<&str>)> = Vec::new();
    for (from, e, to) in a.transitions() {
        let key = (from, to, a.alphabet().is_controllable(e));
        let label = a.alphabet().event(e).as_str();
        match edges.iter_mut().find(|(k, _)| *k == key) {
            Some((_, labels)) => labels.push(label),
            None => edges.push((key, vec![label])),
        }
    }
    for ((from, to, controllable), labels) in edges {
        let style = if controllable { "" } else { ", style=dashed" };
        let label = labels.iter().map(|l| escape(l)).collect::<Vec<_>>().join("\\n");
        writeln!(out, "  {} -> {} [label=\"{label}\"{style}];", quote(a.state_name(from)), quote(a.state_name(to)))
            .unwrap();
    }
    out.push_str("}\n");
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

fn escape(s: &str) -> String {
    let mut q = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            _ => q.push(c),
        }
    }
    q
}

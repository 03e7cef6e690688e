//! Graphviz export of pomsets as Hasse diagrams.

use std::io;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pomset::{Label, SpPomset};
use crate::poset::{to_poset, LabelledPoset};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The Hasse diagram of `u`: one node `n{i}` per leaf, one edge per covering pair.
pub fn to_dot(u: &SpPomset) -> String {
    let p = to_poset(u);
    let mut out = String::from("digraph pomset {\n  rankdir=LR;\n");
    for (i, l) in p.labels().iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{}\"];\n", escape(l.as_str())));
    }
    for (i, j) in p.covering_pairs() {
        out.push_str(&format!("  n{i} -> n{j};\n"));
    }
    out.push_str("}\n");
    out
}

pub fn export_dot(u: &SpPomset, path: &Path) -> io::Result<()> {
    std::fs::write(path, to_dot(u))
}

fn unescape(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(n) = chars.next() {
                out.push(n);
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn node_index(s: &str) -> Option<usize> {
    s.trim().strip_prefix('n')?.parse().ok()
}

/// Reads back the output of [`to_dot`].
pub fn parse_dot(text: &str) -> Result<LabelledPoset> {
    let bad = |m: &str| Error::Syntax {
        offset: 0,
        message: m.to_string(),
    };
    let mut labels: Vec<(usize, Label)> = Vec::new();
    let mut edges = Vec::new();
    for line in text.lines().map(str::trim) {
        let line = line.trim_end_matches(';');
        if let Some((lhs, rhs)) = line.split_once("->") {
            let i = node_index(lhs).ok_or_else(|| bad("bad edge source"))?;
            let j = node_index(rhs).ok_or_else(|| bad("bad edge target"))?;
            edges.push((i, j));
        } else if let Some((node, attrs)) = line.split_once(" [label=\"") {
            let i = node_index(node).ok_or_else(|| bad("bad node name"))?;
            let raw = attrs
                .strip_suffix("\"]")
                .ok_or_else(|| bad("bad node attributes"))?;
            labels.push((i, Label::new(unescape(raw))?));
        }
    }
    labels.sort_by_key(|(i, _)| *i);
    if labels.iter().enumerate().any(|(k, (i, _))| k != *i) {
        return Err(bad("nodes are not numbered consecutively"));
    }
    LabelledPoset::from_pairs(labels.into_iter().map(|(_, l)| l).collect(), &edges)
}

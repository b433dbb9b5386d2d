//! `.mcg` graph files and cut files.
//!
//! ```text
//! c comment lines may appear anywhere
//! p mcg <n> <m> <k>
//! e <u> <v> <capacity> [<length>]     (m lines, 1-indexed vertices; capacity may be `inf`)
//! t <s> <t>                           (k lines)
//! ```
//!
//! Cut files list one 1-indexed edge number (position among the `e` lines) per line.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use mcut_core::graph::{Capacity, CutSet, EdgeId, Graph};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// A parsed `.mcg` file.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    /// All edge lines carried a length.
    pub has_lengths: bool,
}

impl Instance {
    pub fn lengths(&self) -> Option<Vec<f64>> {
        self.has_lengths
            .then(|| self.graph.edges().iter().map(|e| e.length).collect())
    }
}

fn number<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, FormatError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("invalid {what} '{tok}'")))
}

fn vertex(tok: Option<&str>, line: usize, n: usize) -> Result<usize, FormatError> {
    let v: usize = number(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(syntax(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

/// Parses a `.mcg` graph.
pub fn parse_graph(text: &str) -> Result<Instance, FormatError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut pairs = Vec::new();
    let mut seen = BTreeSet::new();
    let mut with_length = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let mut toks = raw.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        match tag {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(syntax(line, "second problem line"));
                }
                if toks.next() != Some("mcg") {
                    return Err(syntax(line, "expected 'p mcg <n> <m> <k>'"));
                }
                let n = number(toks.next(), line, "vertex count")?;
                let m = number(toks.next(), line, "edge count")?;
                let k = number(toks.next(), line, "pair count")?;
                header = Some((n, m, k));
            }
            "e" => {
                let (n, m, _) = header.ok_or_else(|| syntax(line, "edge before problem line"))?;
                if !pairs.is_empty() {
                    return Err(syntax(line, "edge after terminal pairs"));
                }
                if edges.len() == m {
                    return Err(syntax(line, format!("more than {m} edges")));
                }
                let u = vertex(toks.next(), line, n)?;
                let v = vertex(toks.next(), line, n)?;
                if u == v {
                    return Err(syntax(line, "self-loop"));
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return Err(syntax(line, format!("duplicate edge {} {}", u + 1, v + 1)));
                }
                let cap_tok = toks.next().ok_or_else(|| syntax(line, "missing capacity"))?;
                let capacity = if cap_tok == "inf" {
                    Capacity::Infinite
                } else {
                    let c: f64 = number(Some(cap_tok), line, "capacity")?;
                    if !(c.is_finite() && c >= 0.0) {
                        return Err(syntax(line, format!("capacity {cap_tok} must be finite and nonnegative")));
                    }
                    Capacity::Finite(c)
                };
                let length = match toks.next() {
                    Some(tok) => {
                        let l: f64 = number(Some(tok), line, "length")?;
                        if !(l.is_finite() && l >= 0.0) {
                            return Err(syntax(line, format!("length {tok} must be finite and nonnegative")));
                        }
                        if capacity.is_infinite() && l != 0.0 {
                            return Err(syntax(line, "infinite-capacity edge must have length 0"));
                        }
                        Some(l)
                    }
                    None => None,
                };
                match with_length {
                    None => with_length = Some(length.is_some()),
                    Some(flag) if flag != length.is_some() => {
                        return Err(syntax(line, "either every edge has a length or none does"))
                    }
                    _ => {}
                }
                if let Some(extra) = toks.next() {
                    return Err(syntax(line, format!("unexpected token '{extra}'")));
                }
                edges.push((u, v, capacity, length.unwrap_or(0.0)));
            }
            "t" => {
                let (n, m, k) = header.ok_or_else(|| syntax(line, "pair before problem line"))?;
                if edges.len() != m {
                    return Err(syntax(line, format!("expected {m} edges before pairs, found {}", edges.len())));
                }
                if pairs.len() == k {
                    return Err(syntax(line, format!("more than {k} pairs")));
                }
                let s = vertex(toks.next(), line, n)?;
                let t = vertex(toks.next(), line, n)?;
                if s == t {
                    return Err(syntax(line, "pair with identical endpoints"));
                }
                if let Some(extra) = toks.next() {
                    return Err(syntax(line, format!("unexpected token '{extra}'")));
                }
                pairs.push((s, t));
            }
            other => return Err(syntax(line, format!("unknown line type '{other}'"))),
        }
    }
    let (n, m, k) = header.ok_or_else(|| syntax(last_line.max(1), "missing problem line"))?;
    if edges.len() != m {
        return Err(syntax(last_line, format!("expected {m} edges, found {}", edges.len())));
    }
    if pairs.len() != k {
        return Err(syntax(last_line, format!("expected {k} pairs, found {}", pairs.len())));
    }
    let graph = Graph::new(n, edges, pairs).map_err(|e| FormatError::Invalid(e.to_string()))?;
    Ok(Instance {
        graph,
        has_lengths: with_length.unwrap_or(false),
    })
}

/// Writes a graph in `.mcg` syntax; lengths are emitted when `with_lengths`.
pub fn serialize_graph(g: &Graph, with_lengths: bool) -> String {
    let mut out = String::new();
    writeln!(out, "p mcg {} {} {}", g.universe(), g.edge_count(), g.pairs().len()).unwrap();
    for e in g.edges() {
        let cap = match e.capacity {
            Capacity::Finite(c) => c.to_string(),
            Capacity::Infinite => "inf".to_string(),
        };
        if with_lengths {
            writeln!(out, "e {} {} {cap} {}", e.u + 1, e.v + 1, e.length).unwrap();
        } else {
            writeln!(out, "e {} {} {cap}", e.u + 1, e.v + 1).unwrap();
        }
    }
    for &(s, t) in g.pairs() {
        writeln!(out, "t {} {}", s + 1, t + 1).unwrap();
    }
    out
}

/// Parses a cut file against `g` (1-indexed edge numbers, `c` comments allowed).
pub fn parse_cut(text: &str, g: &Graph) -> Result<CutSet, FormatError> {
    let mut ids = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        let Some(tok) = toks.next() else { continue };
        if tok == "c" {
            continue;
        }
        let num: usize = number(Some(tok), line, "edge number")?;
        if num == 0 || num > g.edge_count() {
            return Err(syntax(line, format!("edge {num} outside 1..={}", g.edge_count())));
        }
        if let Some(extra) = toks.next() {
            return Err(syntax(line, format!("unexpected token '{extra}'")));
        }
        ids.insert(g.edges()[num - 1].id);
    }
    CutSet::new(g, ids).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// 1-indexed edge numbers of a cut, as written to cut files and reports.
pub fn edge_numbers(g: &Graph, ids: &BTreeSet<EdgeId>) -> Vec<usize> {
    ids.iter()
        .filter_map(|&id| g.position_of(id))
        .map(|p| p + 1)
        .collect()
}

pub fn serialize_cut(g: &Graph, cut: &CutSet) -> String {
    edge_numbers(g, &cut.edge_ids)
        .into_iter()
        .map(|n| format!("{n}\n"))
        .collect()
}

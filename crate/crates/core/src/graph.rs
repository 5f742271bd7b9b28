//! Simple undirected graphs and the PACE `.gr` format.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds `uv`; self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.adj.len() && v < self.adj.len(), "edge out of range");
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|s| s.contains(&v))
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.range(u + 1..).map(move |&v| (u, v)))
    }

    /// Parses the PACE `.gr` format (`p tw <n> <m>` followed by 1-based edge lines).
    pub fn parse_gr(text: &str) -> Result<Graph> {
        let mut graph: Option<Graph> = None;
        let mut declared_edges = 0;
        let mut seen_edges = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields[0] == "p" {
                if graph.is_some() {
                    return Err(syntax(line, "duplicate header"));
                }
                if fields.len() != 4 || fields[1] != "tw" {
                    return Err(syntax(line, "expected `p tw <n> <m>`"));
                }
                let n = parse_num(fields[2], line)?;
                declared_edges = parse_num(fields[3], line)?;
                graph = Some(Graph::new(n));
                continue;
            }
            let g = graph
                .as_mut()
                .ok_or_else(|| syntax(line, "edge before header"))?;
            if fields.len() != 2 {
                return Err(syntax(line, "expected `<u> <v>`"));
            }
            let u = parse_id(fields[0], g.num_vertices(), line)?;
            let v = parse_id(fields[1], g.num_vertices(), line)?;
            g.add_edge(u, v);
            seen_edges += 1;
        }
        let g = graph.ok_or_else(|| syntax(0, "missing `p tw` header"))?;
        if seen_edges != declared_edges {
            return Err(Error::InconsistentHeader(format!(
                "header declares {declared_edges} edges, found {seen_edges}"
            )));
        }
        Ok(g)
    }

    pub fn to_gr(&self) -> String {
        let mut out = format!("p tw {} {}\n", self.num_vertices(), self.num_edges());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{} {}", u + 1, v + 1);
        }
        out
    }
}

pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        msg: msg.into(),
    }
}

pub(crate) fn parse_num(field: &str, line: usize) -> Result<usize> {
    field
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("`{field}` is not a non-negative integer")))
}

/// Parses a 1-based id and returns it 0-based.
pub(crate) fn parse_id(field: &str, n: usize, line: usize) -> Result<usize> {
    let id = parse_num(field, line)?;
    if id == 0 || id > n {
        return Err(Error::IdOutOfRange { id, n });
    }
    Ok(id - 1)
}

//! Finite posets stored as a cover relation plus a cached strict order.
//!
//! Elements are `0..n` in the library; the text format numbers them from 1.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{parse_id, parse_num, syntax, Graph};

/// A row of the strict-order matrix, one bit per element.
#[derive(Clone, Debug, PartialEq, Eq)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn zeros(n: usize) -> Self {
        BitRow(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn or_assign(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit)
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    covers: Vec<(usize, usize)>,
    above: Vec<BitRow>,
}

impl Poset {
    /// Builds the poset generated by `relations` (pairs `(u, v)` meaning `u < v`).
    ///
    /// The stored covers are the transitive reduction of the closure, so
    /// redundant input pairs are dropped.
    pub fn new(n: usize, relations: &[(usize, usize)]) -> Result<Poset> {
        let mut succ = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for &(u, v) in relations {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::IdOutOfRange { id: id + 1, n });
                }
            }
            if u == v {
                return Err(Error::CycleDetected(u));
            }
            succ[u].push(v);
            indegree[v] += 1;
        }

        // Kahn's algorithm doubles as the cycle check.
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| indegree[v] == 0).collect();
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &succ[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    stack.push(w);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&v| indegree[v] > 0).unwrap_or(0);
            return Err(Error::CycleDetected(stuck));
        }

        let mut above = vec![BitRow::zeros(n); n];
        for &v in order.iter().rev() {
            let mut row = BitRow::zeros(n);
            for &w in &succ[v] {
                row.set(w);
                row.or_assign(&above[w]);
            }
            above[v] = row;
        }

        let mut covers = Vec::new();
        for u in 0..n {
            let mut beyond = BitRow::zeros(n);
            for w in above[u].ones() {
                beyond.or_assign(&above[w]);
            }
            for v in above[u].ones() {
                if !beyond.get(v) {
                    covers.push((u, v));
                }
            }
        }
        Ok(Poset { n, covers, above })
    }

    pub fn antichain(n: usize) -> Poset {
        Poset::new(n, &[]).expect("empty relation is a strict order")
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Poset {
        let rel: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::new(n, &rel).expect("a path is acyclic")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Cover pairs `(u, v)`, `u` covered by `v`, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// `x < y`. Panics on out-of-range ids.
    pub fn less(&self, x: usize, y: usize) -> bool {
        self.above[x].get(y)
    }

    /// `x <= y`. Panics on out-of-range ids.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        x == y || self.less(x, y)
    }

    pub fn try_leq(&self, x: usize, y: usize) -> Result<bool> {
        for id in [x, y] {
            if id >= self.n {
                return Err(Error::IdOutOfRange {
                    id: id + 1,
                    n: self.n,
                });
            }
        }
        Ok(self.leq(x, y))
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// Elements strictly above `x`.
    pub fn up_set(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.above[x].ones()
    }

    pub fn cover_graph(&self) -> Graph {
        Graph::from_edges(self.n, self.covers.iter().copied())
    }

    /// Subposet induced on `elems`; element `i` of the result is `elems[i]`.
    pub fn induced(&self, elems: &[usize]) -> Poset {
        let mut rel = Vec::new();
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                if self.less(a, b) {
                    rel.push((i, j));
                }
            }
        }
        Poset::new(elems.len(), &rel).expect("a subposet is a poset")
    }

    /// Text format: `p poset <n> <m>` then `m` lines `<u> <v>`; `c` lines are comments.
    pub fn parse(text: &str) -> Result<Poset> {
        let mut header: Option<(usize, usize)> = None;
        let mut rel = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields[0] == "p" {
                if header.is_some() {
                    return Err(syntax(line, "duplicate header"));
                }
                if fields.len() != 4 || fields[1] != "poset" {
                    return Err(syntax(line, "expected `p poset <n> <m>`"));
                }
                header = Some((parse_num(fields[2], line)?, parse_num(fields[3], line)?));
                continue;
            }
            let (n, _) = header.ok_or_else(|| syntax(line, "relation before header"))?;
            if fields.len() != 2 {
                return Err(syntax(line, "expected `<u> <v>`"));
            }
            rel.push((parse_id(fields[0], n, line)?, parse_id(fields[1], n, line)?));
        }
        let (n, m) = header.ok_or_else(|| syntax(0, "missing `p poset` header"))?;
        if rel.len() != m {
            return Err(Error::InconsistentHeader(format!(
                "header declares {m} relations, found {}",
                rel.len()
            )));
        }
        Poset::new(n, &rel)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("p poset {} {}\n", self.n, self.covers.len());
        for &(u, v) in &self.covers {
            let _ = writeln!(out, "{} {}", u + 1, v + 1);
        }
        out
    }
}

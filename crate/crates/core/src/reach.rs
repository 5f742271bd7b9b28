//! Reachability labels for digraphs.
//!
//! Strongly connected components are contracted, reachability on the
//! condensation is a partial order, and a realizer for that order turns into
//! labels: the label of a vertex lists the positions of its component in every
//! permutation. Two labels alone give the order bits of the pair, and the
//! realizer's program decides reachability from them.

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::bp::OrderBits;
use crate::error::{Error, Result};
use crate::graph::{parse_id, parse_num, syntax};
use crate::poset::Poset;
use crate::realizer::{self, Realizer};
use crate::treedec::{heuristic_decompose, TreeDecomposition};

pub const DESCRIPTOR_VERSION: u32 = 1;

/// A directed graph on `0..n`. Parallel arcs collapse; loops are kept but
/// play no part in reachability.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: BTreeSet<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { n, arcs: BTreeSet::new() }
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Digraph::new(n);
        for (u, v) in arcs {
            g.add_arc(u, v);
        }
        g
    }

    pub fn add_arc(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "arc ({u}, {v}) out of range");
        self.arcs.insert((u, v));
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    /// Parses `p digraph <n> <m>` followed by `<u> <v>` arc lines (1-based);
    /// lines starting with `c` are comments.
    pub fn parse(text: &str) -> Result<Digraph> {
        let mut header: Option<(usize, usize)> = None;
        let mut g = Digraph::default();
        let mut seen_arcs = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] == "p" {
                if header.is_some() || fields.len() != 4 || fields[1] != "digraph" {
                    return Err(syntax(line_no, "expected `p digraph <n> <m>` once"));
                }
                let n = parse_num(fields[2], line_no)?;
                let m = parse_num(fields[3], line_no)?;
                header = Some((n, m));
                g = Digraph::new(n);
                continue;
            }
            let Some((n, _)) = header else {
                return Err(syntax(line_no, "arc before header"));
            };
            if fields.len() != 2 {
                return Err(syntax(line_no, "expected `<u> <v>`"));
            }
            let u = parse_id(fields[0], n, line_no)?;
            let v = parse_id(fields[1], n, line_no)?;
            g.add_arc(u, v);
            seen_arcs += 1;
        }
        match header {
            None => Err(syntax(0, "missing header")),
            Some((_, m)) if m != seen_arcs => Err(Error::InconsistentHeader(format!("header announces {m} arcs, found {seen_arcs}"))),
            Some(_) => Ok(g),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("p digraph {} {}\n", self.n, self.arcs.len());
        for &(u, v) in &self.arcs {
            s.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        s
    }
}

/// Contracts strongly connected components. Components are numbered by
/// their smallest vertex; the result has no loops.
pub fn condense_scc(g: &Digraph) -> (Digraph, Vec<usize>) {
    let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(g.n, g.arcs.len());
    let idx: Vec<_> = (0..g.n).map(|_| pg.add_node(())).collect();
    for &(u, v) in &g.arcs {
        pg.add_edge(idx[u], idx[v], ());
    }
    let mut sccs: Vec<Vec<usize>> = tarjan_scc(&pg)
        .into_iter()
        .map(|c| c.into_iter().map(|v| v.index()).collect())
        .collect();
    sccs.sort_by_key(|c| *c.iter().min().expect("components are nonempty"));
    let mut comp = vec![0; g.n];
    for (i, c) in sccs.iter().enumerate() {
        for &v in c {
            comp[v] = i;
        }
    }
    let dag = Digraph::from_arcs(
        sccs.len(),
        g.arcs.iter().map(|&(u, v)| (comp[u], comp[v])).filter(|(a, b)| a != b),
    );
    (dag, comp)
}

/// The reachability order of an acyclic digraph.
pub fn digraph_to_poset(dag: &Digraph) -> Result<Poset> {
    let rel: Vec<(usize, usize)> = dag.arcs().filter(|(u, v)| u != v).collect();
    Poset::new(dag.n, &rel)
}

fn field_width(components: usize) -> usize {
    match components {
        0 | 1 => 0,
        c => (usize::BITS - (c - 1).leading_zeros()) as usize,
    }
}

/// Labels of all vertices plus what the decoder needs.
#[derive(Clone, Debug)]
pub struct LabelScheme {
    pub comp: Vec<usize>,
    pub labels: Vec<Vec<bool>>,
    pub field_width: usize,
    pub realizer: Realizer,
}

impl LabelScheme {
    pub fn bits_per_label(&self) -> usize {
        self.field_width * self.realizer.count_permutations()
    }

    pub fn descriptor(&self) -> Descriptor {
        Descriptor {
            field_width: self.field_width,
            components: self.comp.clone(),
            realizer: self.realizer.clone(),
        }
    }

    /// One line per vertex: `<v> <hex label>`, 1-based.
    pub fn export(&self) -> String {
        let mut s = String::new();
        for (v, l) in self.labels.iter().enumerate() {
            s.push_str(&format!("{} {}\n", v + 1, to_hex(l)));
        }
        s
    }
}

/// Builds labels for `g`. A decomposition, when given, must cover the cover
/// graph of the condensation; otherwise a heuristic one is used.
pub fn build_labels(g: &Digraph, td: Option<&TreeDecomposition>) -> Result<LabelScheme> {
    let (dag, comp) = condense_scc(g);
    let poset = digraph_to_poset(&dag)?;
    let owned;
    let td = match td {
        Some(td) => td,
        None => {
            owned = heuristic_decompose(&poset.cover_graph());
            &owned
        }
    };
    let realizer = realizer::build(&poset, td)?;
    let w = field_width(dag.num_vertices());
    let positions: Vec<Vec<usize>> = (0..dag.num_vertices())
        .map(|c| {
            realizer
                .permutations()
                .iter()
                .map(|p| p.position(c).expect("permutations cover all components"))
                .collect()
        })
        .collect();
    let labels = comp
        .iter()
        .map(|&c| {
            let mut bits = Vec::with_capacity(w * positions[c].len());
            for &pos in &positions[c] {
                bits.extend((0..w).rev().map(|b| pos >> b & 1 == 1));
            }
            bits
        })
        .collect();
    Ok(LabelScheme {
        comp,
        labels,
        field_width: w,
        realizer,
    })
}

/// Everything the decoder reads besides the two labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descriptor {
    pub field_width: usize,
    pub components: Vec<usize>,
    pub realizer: Realizer,
}

#[derive(Serialize, Deserialize)]
struct DescriptorFile {
    version: u32,
    field_width: usize,
    /// Component of every vertex, 1-based.
    components: Vec<usize>,
    realizer: serde_json::Value,
}

impl Descriptor {
    pub fn to_json(&self) -> String {
        let file = DescriptorFile {
            version: DESCRIPTOR_VERSION,
            field_width: self.field_width,
            components: self.components.iter().map(|c| c + 1).collect(),
            realizer: serde_json::from_str(&self.realizer.serialize()).expect("realizer JSON"),
        };
        serde_json::to_string(&file).expect("descriptor serializes")
    }

    pub fn from_json(text: &str) -> Result<Descriptor> {
        let file: DescriptorFile = serde_json::from_str(text).map_err(|e| Error::CorruptPayload(e.to_string()))?;
        if file.version != DESCRIPTOR_VERSION {
            return Err(Error::VersionMismatch {
                found: file.version,
                expected: DESCRIPTOR_VERSION,
            });
        }
        if file.components.contains(&0) {
            return Err(Error::CorruptPayload("component id 0".into()));
        }
        Ok(Descriptor {
            field_width: file.field_width,
            components: file.components.into_iter().map(|c| c - 1).collect(),
            realizer: Realizer::deserialize(&file.realizer.to_string())?,
        })
    }

    pub fn bits_per_label(&self) -> usize {
        self.field_width * self.realizer.count_permutations()
    }
}

fn positions(label: &[bool], w: usize) -> Vec<usize> {
    if w == 0 {
        return Vec::new();
    }
    label
        .chunks(w)
        .map(|field| field.iter().fold(0, |acc, &b| acc << 1 | usize::from(b)))
        .collect()
}

/// Whether the vertex labelled `l2` is reachable from the one labelled `l1`.
pub fn decode(l1: &[bool], l2: &[bool], desc: &Descriptor) -> Result<bool> {
    let expected = desc.bits_per_label();
    for l in [l1, l2] {
        if l.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: l.len(),
            });
        }
    }
    let d = desc.realizer.count_permutations();
    let bits = if desc.field_width == 0 {
        vec![true; d]
    } else {
        let (p1, p2) = (positions(l1, desc.field_width), positions(l2, desc.field_width));
        p1.iter().zip(&p2).map(|(a, b)| a <= b).collect()
    };
    desc.realizer.query_bits(&OrderBits(bits))
}

/// Most significant bit first, left-padded to whole hex digits; `-` when empty.
pub fn to_hex(bits: &[bool]) -> String {
    if bits.is_empty() {
        return "-".into();
    }
    let pad = (4 - bits.len() % 4) % 4;
    let padded: Vec<bool> = std::iter::repeat(false).take(pad).chain(bits.iter().copied()).collect();
    padded
        .chunks(4)
        .map(|c| {
            let v = c.iter().fold(0u32, |acc, &b| acc << 1 | u32::from(b));
            char::from_digit(v, 16).expect("nibble")
        })
        .collect()
}

/// Inverse of [`to_hex`] for a label of `len` bits.
pub fn from_hex(text: &str, len: usize) -> Result<Vec<bool>> {
    let text = text.trim();
    if text == "-" {
        return if len == 0 {
            Ok(Vec::new())
        } else {
            Err(Error::LengthMismatch { expected: len, actual: 0 })
        };
    }
    let mut bits = Vec::with_capacity(text.len() * 4);
    for ch in text.chars() {
        let v = ch.to_digit(16).ok_or_else(|| Error::CorruptPayload(format!("`{ch}` is not a hex digit")))?;
        bits.extend((0..4).rev().map(|b| v >> b & 1 == 1));
    }
    let pad = bits.len().checked_sub(len).ok_or(Error::LengthMismatch {
        expected: len,
        actual: bits.len(),
    })?;
    if pad >= 4 || bits[..pad].iter().any(|&b| b) {
        return Err(Error::LengthMismatch {
            expected: len,
            actual: bits.len(),
        });
    }
    Ok(bits.split_off(pad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::reachability;

    #[test]
    fn cycle_condenses() {
        let g = Digraph::from_arcs(5, (0..5).map(|i| (i, (i + 1) % 5)));
        let (dag, comp) = condense_scc(&g);
        assert_eq!(dag.num_vertices(), 1);
        assert_eq!(comp, vec![0; 5]);
        assert_eq!(dag.num_arcs(), 0);
    }

    #[test]
    fn acyclic_is_identity() {
        let g = Digraph::from_arcs(4, [(0, 1), (1, 2), (0, 3)]);
        let (dag, comp) = condense_scc(&g);
        assert_eq!(comp, vec![0, 1, 2, 3]);
        assert_eq!(dag, g);
        let p = digraph_to_poset(&dag).unwrap();
        assert!(p.leq(0, 2) && !p.leq(3, 2));
        assert!(digraph_to_poset(&Digraph::new(3)).unwrap().covers().is_empty());
    }

    #[test]
    fn widths() {
        assert_eq!(field_width(1), 0);
        assert_eq!(field_width(2), 1);
        assert_eq!(field_width(100), 7);
        assert_eq!(field_width(128), 7);
        assert_eq!(field_width(129), 8);
    }

    #[test]
    fn hex_round_trip() {
        let bits = vec![true, false, true, true, false, true];
        let h = to_hex(&bits);
        assert_eq!(h, "2d");
        assert_eq!(from_hex(&h, 6).unwrap(), bits);
        assert_eq!(to_hex(&[]), "-");
        assert!(from_hex("ff", 6).is_err());
    }

    #[test]
    fn labels_decide_reachability() {
        let g = Digraph::from_arcs(6, [(0, 1), (1, 0), (1, 2), (2, 3), (4, 3), (5, 5)]);
        let s = build_labels(&g, None).unwrap();
        assert_eq!(s.labels[0], s.labels[1]);
        let desc = Descriptor::from_json(&s.descriptor().to_json()).unwrap();
        let arcs: Vec<_> = g.arcs().collect();
        let reach = reachability(6, &arcs);
        for u in 0..6 {
            for v in 0..6 {
                assert_eq!(decode(&s.labels[u], &s.labels[v], &desc).unwrap(), reach[u][v]);
            }
        }
        assert!(matches!(decode(&[true], &s.labels[0], &desc), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn parse_round_trip() {
        let g = Digraph::parse("c x\np digraph 3 2\n1 2\n3 3\n").unwrap();
        assert_eq!(g.num_arcs(), 2);
        assert_eq!(Digraph::parse(&g.to_text()).unwrap(), g);
        assert!(matches!(Digraph::parse("p digraph 3 2\n1 2\n"), Err(Error::InconsistentHeader(_))));
    }
}

//! Brute-force ground truth.
//!
//! Nothing here calls into the constructions it checks: the oracles walk the
//! raw poset, tree and `D` data directly.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::poset::Poset;
use crate::realizer::Realizer;
use crate::sigdag::{DagD, Rel, SignatureDag};
use crate::tree::RootedTree;
use crate::treedec::NormalizedDecomposition;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub x: usize,
    pub y: usize,
    pub expected: bool,
    /// `None` when the query itself failed.
    pub got: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralCheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub instance: String,
    pub pairs_checked: usize,
    pub mismatches: Vec<Mismatch>,
    pub structural: Vec<StructuralCheck>,
    pub pass: bool,
    pub elapsed_ms: u128,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn add_checks(&mut self, checks: Vec<StructuralCheck>) {
        self.structural.extend(checks);
        self.pass = self.mismatches.is_empty() && self.structural.iter().all(|c| c.ok);
    }
}

/// Compares the realizer with `leq` on every ordered pair, `x = y` included.
pub fn verify_all_pairs(p: &Poset, r: &Realizer) -> VerificationReport {
    let start = Instant::now();
    let n = p.len();
    let mismatches: Vec<Mismatch> = if r.num_elements() != n {
        vec![Mismatch {
            x: 0,
            y: 0,
            expected: true,
            got: None,
        }]
    } else {
        (0..n)
            .into_par_iter()
            .map_init(
                || r.evaluator(),
                |ev, x| {
                    let mut bad = Vec::new();
                    for y in 0..n {
                        let expected = p.leq(x, y);
                        let got = r.bits(x, y).and_then(|b| ev.eval(&b)).ok();
                        if got != Some(expected) {
                            bad.push(Mismatch { x, y, expected, got });
                        }
                    }
                    bad
                },
            )
            .flatten()
            .collect()
    };
    VerificationReport {
        instance: format!("poset on {n} elements, {} permutations", r.count_permutations()),
        pairs_checked: n * n,
        pass: mismatches.is_empty(),
        mismatches,
        structural: Vec::new(),
        elapsed_ms: start.elapsed().as_millis(),
    }
}

/// Whether `a` is an ancestor of `b` or equal to it, by walking parents.
fn ancestor_walk(tree: &RootedTree, a: usize, mut b: usize) -> bool {
    loop {
        if a == b {
            return true;
        }
        match tree.parent(b) {
            Some(p) => b = p,
            None => return false,
        }
    }
}

fn meet_walk(tree: &RootedTree, u: usize, v: usize) -> usize {
    let mut a = u;
    while !ancestor_walk(tree, a, v) {
        a = tree.parent(a).expect("the root is a common ancestor");
    }
    a
}

/// Nodes from `a` up to its descendant `b`, both included.
fn path_walk(tree: &RootedTree, a: usize, b: usize) -> Vec<usize> {
    let mut path = vec![b];
    let mut cur = b;
    while cur != a {
        cur = tree.parent(cur).expect("a is an ancestor of b");
        path.push(cur);
    }
    path.reverse();
    path
}

/// The D vertex reached from `d` by following edges up to `target`.
fn walk_d(dag: &DagD, tree: &RootedTree, d: usize, target: usize) -> Vec<usize> {
    let nodes = path_walk(tree, dag.node_of(d), target);
    let mut verts = vec![d];
    for &t in &nodes[1..] {
        let v = *verts.last().expect("nonempty");
        let next = dag
            .out_neighbors(v)
            .iter()
            .copied()
            .find(|&w| dag.node_of(w) == t)
            .expect("every vertex has an out-neighbour per child");
        verts.push(next);
    }
    verts
}

/// `x <= y` (for `x != y`) via the two-path characterization: some vertex of
/// `D` at the meet of the roots has a path to `D_root(x)` ending at a key
/// with `>` or `=` at the colour of `x`, and a path to `D_root(y)` ending at
/// a key with `<` or `=` at the colour of `y`.
pub fn bruteforce_two_seq(nd: &NormalizedDecomposition, sd: &SignatureDag, x: usize, y: usize) -> bool {
    let tree = nd.tree();
    let (rx, ry) = (nd.root_of(x), nd.root_of(y));
    let m = meet_walk(tree, rx, ry);
    let (cx, cy) = (sd.coloring.color(x) as usize - 1, sd.coloring.color(y) as usize - 1);
    sd.dag.level(m).iter().any(|&d| {
        let vx = *walk_d(&sd.dag, tree, d, rx).last().expect("nonempty");
        let vy = *walk_d(&sd.dag, tree, d, ry).last().expect("nonempty");
        matches!(sd.dag.key(vx)[cx], Rel::Gt | Rel::Eq) && matches!(sd.dag.key(vy)[cy], Rel::Lt | Rel::Eq)
    })
}

/// Colour of tree edges by child endpoint: `None` uncoloured, `Some(true)` RED.
pub type ScanColors = [Option<bool>];

/// Whether the first coloured edge on the path from `x ∧ y` up to the queried
/// endpoint is RED. The queried endpoint is `x` for `Side::X` and `y`
/// otherwise; pairs where it is the meet itself answer false.
pub fn path_scan_color_oracle(tree: &RootedTree, colors: &ScanColors, x: usize, y: usize, x_side: bool) -> bool {
    let (target, other) = if x_side { (x, y) } else { (y, x) };
    let m = meet_walk(tree, target, other);
    if m == target {
        return false;
    }
    path_walk(tree, m, target)[1..]
        .iter()
        .find_map(|&t| colors[t])
        .unwrap_or(false)
}

/// Whether some path in `D` from the level of `meet` to the level of
/// `target` has colour signature `gamma`.
pub fn bruteforce_signature_exists(sd: &SignatureDag, tree: &RootedTree, meet: usize, target: usize, gamma: &[u32]) -> bool {
    if !ancestor_walk(tree, meet, target) {
        return false;
    }
    sd.dag.level(meet).iter().any(|&d| {
        let mut sig: Vec<u32> = Vec::new();
        for v in walk_d(&sd.dag, tree, d, target) {
            let c = sd.cd.color(v);
            if sig.last() != Some(&c) {
                sig.push(c);
            }
        }
        sig == gamma
    })
}

/// Reflexive-transitive closure of a digraph by breadth-first search.
pub fn reachability(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in arcs {
        adj[u].push(v);
    }
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect()
}

fn check(name: &str, failures: Vec<String>) -> StructuralCheck {
    StructuralCheck {
        name: name.into(),
        ok: failures.is_empty(),
        detail: failures.into_iter().take(5).collect::<Vec<_>>().join("; "),
    }
}

fn key_direct(p: &Poset, nd: &NormalizedDecomposition, sd: &SignatureDag, z: usize, t: usize) -> Vec<Rel> {
    let mut key = vec![Rel::Star; sd.coloring.num_colors()];
    for &w in nd.bag(t) {
        key[sd.coloring.color(w) as usize - 1] = if w == z {
            Rel::Eq
        } else if p.less(z, w) {
            Rel::Lt
        } else if p.less(w, z) {
            Rel::Gt
        } else {
            Rel::Incomp
        };
    }
    key
}

/// Every vertex of `D_t` has exactly one out-neighbour in `D_t'` for each
/// child `t'`, and all its witnesses agree on where they go.
pub fn check_unique_out_neighbor(p: &Poset, nd: &NormalizedDecomposition, sd: &SignatureDag) -> StructuralCheck {
    let tree = nd.tree();
    let dag = &sd.dag;
    let mut bad = Vec::new();
    for v in 0..dag.num_vertices() {
        let t = dag.node_of(v);
        for &ch in tree.children(t) {
            let outs: Vec<usize> = dag.out_neighbors(v).iter().copied().filter(|&w| dag.node_of(w) == ch).collect();
            let keys: BTreeSet<Vec<Rel>> = dag.witnesses(v).iter().map(|&z| key_direct(p, nd, sd, z, ch)).collect();
            if outs.len() != 1 || keys.len() != 1 || keys.first().map(Vec::as_slice) != Some(dag.key(outs[0])) {
                bad.push(format!("vertex {v} towards child {ch}"));
            }
        }
    }
    check("unique out-neighbour", bad)
}

/// Colours of `D` are distinct within a level and never increase along an edge.
pub fn check_cd_colors(sd: &SignatureDag, tree_len: usize) -> StructuralCheck {
    let dag = &sd.dag;
    let mut bad = Vec::new();
    for t in 0..tree_len {
        let colors: BTreeSet<u32> = dag.level(t).iter().map(|&v| sd.cd.color(v)).collect();
        if colors.len() != dag.level(t).len() {
            bad.push(format!("repeated colour at node {t}"));
        }
    }
    for v in 0..dag.num_vertices() {
        for &w in dag.out_neighbors(v) {
            if sd.cd.color(w) > sd.cd.color(v) {
                bad.push(format!("colour increases on {v} -> {w}"));
            }
        }
    }
    check("c_D colours", bad)
}

/// Members of each family share no tree node.
pub fn check_disjoint<'a>(families: impl IntoIterator<Item = (String, &'a [Vec<usize>])>) -> StructuralCheck {
    let mut bad = Vec::new();
    for (name, members) in families {
        let mut seen = BTreeSet::new();
        for nodes in members {
            if let Some(t) = nodes.iter().find(|&&t| !seen.insert(t)) {
                bad.push(format!("{name}: node {t} in two members"));
                break;
            }
        }
    }
    check("family disjointness", bad)
}

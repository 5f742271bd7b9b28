//! The comparison DAG over a normalized decomposition.
//!
//! Elements are coloured greedily so that every bag is rainbow. At a tree node
//! `t`, an element `z` rooted at or below `t` is summarised by `vec(z, t)`: its
//! relation to the representative of each colour in `B_t`. The distinct vectors
//! at `t` form the level `D_t` of a DAG whose edges follow each element from a
//! node to its children. Every vertex has exactly one out-neighbour per child
//! node, which is what makes the colouring `c_D` and signatures well defined.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::tree::RootedTree;
use crate::treedec::NormalizedDecomposition;

/// Relation of an element to a representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rel {
    Lt,
    Gt,
    Incomp,
    Eq,
    Star,
}

impl Rel {
    pub fn symbol(self) -> char {
        match self {
            Rel::Lt => '<',
            Rel::Gt => '>',
            Rel::Incomp => '|',
            Rel::Eq => '=',
            Rel::Star => '*',
        }
    }
}

pub type VecKey = Vec<Rel>;

pub fn key_string(key: &[Rel]) -> String {
    key.iter().map(|r| r.symbol()).collect()
}

/// Element colours `1..=k+1`; elements sharing a bag get distinct colours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementColoring {
    colors: Vec<u32>,
    num_colors: usize,
}

impl ElementColoring {
    pub fn color(&self, z: usize) -> u32 {
        self.colors[z]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// Vector length: the largest bag size of the decomposition.
    pub fn num_colors(&self) -> usize {
        self.num_colors
    }
}

/// Colours elements by increasing preorder rank of their roots, each with the
/// least colour absent from the bag at its root.
pub fn greedy_color(nd: &NormalizedDecomposition) -> ElementColoring {
    let n = nd.num_elements();
    let tree = nd.tree();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&z| tree.pre_rank(nd.root_of(z)));
    let mut colors = vec![0u32; n];
    for z in order {
        let used: BTreeSet<u32> = nd.bag(nd.root_of(z)).iter().map(|&w| colors[w]).filter(|&c| c > 0).collect();
        colors[z] = (1..).find(|c| !used.contains(c)).expect("colours are unbounded");
    }
    let num_colors = nd.decomposition().max_bag_size().max(1);
    ElementColoring { colors, num_colors }
}

/// The element of colour `i` in `B_t`, if any.
pub fn rep(nd: &NormalizedDecomposition, c: &ElementColoring, t: usize, i: u32) -> Option<usize> {
    nd.bag(t).iter().copied().find(|&z| c.color(z) == i)
}

/// `vec(z, t)`; defined when the root of `z` is `t` or an ancestor of `t`.
pub fn vec_of(p: &Poset, nd: &NormalizedDecomposition, c: &ElementColoring, z: usize, t: usize) -> Result<VecKey> {
    if !nd.tree().is_ancestor(nd.root_of(z), t) {
        return Err(Error::PreconditionViolated { elem: z, node: t });
    }
    let mut reps = vec![None; c.num_colors()];
    for &w in nd.bag(t) {
        reps[c.color(w) as usize - 1] = Some(w);
    }
    Ok(key_against(p, z, &reps))
}

fn key_against(p: &Poset, z: usize, reps: &[Option<usize>]) -> VecKey {
    reps.iter()
        .map(|r| match *r {
            None => Rel::Star,
            Some(w) if w == z => Rel::Eq,
            Some(w) if p.less(z, w) => Rel::Lt,
            Some(w) if p.less(w, z) => Rel::Gt,
            Some(_) => Rel::Incomp,
        })
        .collect()
}

/// Vertex set, adjacency and witnesses of the DAG `D`.
#[derive(Clone, Debug)]
pub struct DagD {
    node_of: Vec<usize>,
    key: Vec<VecKey>,
    /// D vertices of each tree node, sorted by key.
    level: Vec<Vec<usize>>,
    /// Out-neighbour towards each child, aligned with the tree's child lists.
    out: Vec<Vec<usize>>,
    in_nbrs: Vec<Vec<usize>>,
    witnesses: Vec<Vec<usize>>,
    /// Index of every tree node in its parent's child list.
    child_index: Vec<usize>,
}

impl DagD {
    pub fn num_vertices(&self) -> usize {
        self.node_of.len()
    }

    pub fn num_edges(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn node_of(&self, d: usize) -> usize {
        self.node_of[d]
    }

    pub fn key(&self, d: usize) -> &[Rel] {
        &self.key[d]
    }

    pub fn level(&self, t: usize) -> &[usize] {
        &self.level[t]
    }

    pub fn out_neighbors(&self, d: usize) -> &[usize] {
        &self.out[d]
    }

    pub fn in_neighbors(&self, d: usize) -> &[usize] {
        &self.in_nbrs[d]
    }

    /// Elements `z` with `vec(z, node_of(d)) = key(d)`.
    pub fn witnesses(&self, d: usize) -> &[usize] {
        &self.witnesses[d]
    }

    /// The out-neighbour of `d` in the level of `child`, a child of `node_of(d)`.
    pub fn step(&self, d: usize, child: usize) -> usize {
        self.out[d][self.child_index[child]]
    }

    /// Follows the unique path from `d` up to tree node `target`, which must
    /// lie in the subtree of `node_of(d)`. Both ends are included.
    pub fn follow(&self, tree: &RootedTree, d: usize, target: usize) -> Vec<usize> {
        let nodes = tree.path_from_ancestor(self.node_of[d], target);
        let mut path = Vec::with_capacity(nodes.len());
        let mut cur = d;
        path.push(cur);
        for &t in &nodes[1..] {
            cur = self.step(cur, t);
            path.push(cur);
        }
        path
    }

    pub fn find(&self, t: usize, key: &[Rel]) -> Option<usize> {
        self.level[t]
            .binary_search_by(|&d| self.key[d].as_slice().cmp(key))
            .ok()
            .map(|i| self.level[t][i])
    }

    pub fn max_level_size(&self) -> usize {
        self.level.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Builds `D` and checks that every vertex has a single out-neighbour per child.
pub fn build_d(p: &Poset, nd: &NormalizedDecomposition, c: &ElementColoring) -> Result<DagD> {
    let tree = nd.tree();
    let m = tree.len();
    let n = nd.num_elements();
    let mut node_of = Vec::new();
    let mut key = Vec::new();
    let mut level = vec![Vec::new(); m];
    let mut witnesses = Vec::new();
    // vec(z, t) for the current t, reused when wiring edges.
    let mut elem_vertex: Vec<HashMap<usize, usize>> = vec![HashMap::new(); m];

    for &t in tree.preorder() {
        let mut reps = vec![None; c.num_colors()];
        for &w in nd.bag(t) {
            reps[c.color(w) as usize - 1] = Some(w);
        }
        let mut groups: HashMap<VecKey, Vec<usize>> = HashMap::new();
        for z in 0..n {
            if tree.is_ancestor(nd.root_of(z), t) {
                groups.entry(key_against(p, z, &reps)).or_default().push(z);
            }
        }
        let mut keys: Vec<(VecKey, Vec<usize>)> = groups.into_iter().collect();
        keys.sort();
        for (k, zs) in keys {
            let d = node_of.len();
            node_of.push(t);
            for &z in &zs {
                elem_vertex[t].insert(z, d);
            }
            key.push(k);
            witnesses.push(zs);
            level[t].push(d);
        }
    }

    let total = node_of.len();
    let mut out = vec![Vec::new(); total];
    let mut in_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); total];
    let mut child_index = vec![0; m];
    for t in 0..m {
        for (i, &ch) in tree.children(t).iter().enumerate() {
            child_index[ch] = i;
            for &d in &level[t] {
                let ws = &witnesses[d];
                let target = elem_vertex[ch][&ws[0]];
                if ws.iter().any(|z| elem_vertex[ch][z] != target) {
                    return Err(Error::LemmaViolation { vertex: d, child: ch });
                }
                out[d].push(target);
                in_sets[target].insert(d);
            }
        }
    }
    Ok(DagD {
        node_of,
        key,
        level,
        out,
        in_nbrs: in_sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        witnesses,
        child_index,
    })
}

/// `c_D`: colours of D vertices, starting at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorCD(Vec<u32>);

impl ColorCD {
    pub fn color(&self, d: usize) -> u32 {
        self.0[d]
    }

    pub fn colors(&self) -> &[u32] {
        &self.0
    }

    pub fn max_color(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// Colours `D` level by level in preorder: the root level gets `1..` in key
/// order, a vertex with in-neighbours takes their least colour, and each
/// remaining vertex takes the least colour unused on its level.
pub fn color_d(d: &DagD, tree: &RootedTree) -> ColorCD {
    let mut color = vec![0u32; d.num_vertices()];
    for &t in tree.preorder() {
        let lvl = d.level(t);
        if t == tree.root() {
            for (i, &v) in lvl.iter().enumerate() {
                color[v] = i as u32 + 1;
            }
            continue;
        }
        let mut used = BTreeSet::new();
        for &v in lvl {
            if let Some(c) = d.in_neighbors(v).iter().map(|&u| color[u]).min() {
                color[v] = c;
                used.insert(c);
            }
        }
        for &v in lvl {
            if color[v] == 0 {
                let c = (1..).find(|c| !used.contains(c)).expect("colours are unbounded");
                color[v] = c;
                used.insert(c);
            }
        }
    }
    ColorCD(color)
}

/// Unique-continuation check on an existing `D`: every witness of a vertex must continue to
/// the same out-neighbour. [`build_d`] already enforces it; this recheck uses
/// the stored data only.
pub fn check_unique_out(p: &Poset, nd: &NormalizedDecomposition, c: &ElementColoring, d: &DagD) -> Result<()> {
    let tree = nd.tree();
    for v in 0..d.num_vertices() {
        let t = d.node_of(v);
        if d.out_neighbors(v).len() != tree.children(t).len() {
            return Err(Error::LemmaViolation { vertex: v, child: t });
        }
        for &ch in tree.children(t) {
            let target = d.step(v, ch);
            for &z in d.witnesses(v) {
                if vec_of(p, nd, c, z, ch)? != d.key(target) {
                    return Err(Error::LemmaViolation { vertex: v, child: ch });
                }
            }
        }
    }
    Ok(())
}

/// Distinct colours within each level, non-increasing along every edge.
pub fn check_color_cd(d: &DagD, c: &ColorCD) -> Result<()> {
    for (t, lvl) in d.level.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for &v in lvl {
            if !seen.insert(c.color(v)) {
                return Err(Error::DuplicateColor { node: t, color: c.color(v) });
            }
        }
    }
    for v in 0..d.num_vertices() {
        for &w in d.out_neighbors(v) {
            if c.color(w) > c.color(v) {
                return Err(Error::ColorIncrease(v, w));
            }
        }
    }
    Ok(())
}

/// Colours along a directed path with consecutive repeats removed.
pub fn signature_of_path(d: &DagD, c: &ColorCD, path: &[usize]) -> Result<Vec<u32>> {
    let mut sig: Vec<u32> = Vec::new();
    for (i, &v) in path.iter().enumerate() {
        if i > 0 && !d.out_neighbors(path[i - 1]).contains(&v) {
            return Err(Error::NotAPath(path[i - 1], v));
        }
        let col = c.color(v);
        if sig.last() != Some(&col) {
            if sig.last().is_some_and(|&l| l < col) {
                return Err(Error::ColorIncrease(path[i - 1], v));
            }
            sig.push(col);
        }
    }
    Ok(sig)
}

/// Vertices reachable from `start` through vertices of colour `gamma`.
pub fn tree_of(d: &DagD, c: &ColorCD, start: usize, gamma: u32) -> Result<Vec<usize>> {
    if c.color(start) != gamma {
        return Err(Error::ColorMismatch {
            vertex: start,
            expected: gamma,
            actual: c.color(start),
        });
    }
    let mut seen = vec![start];
    let mut i = 0;
    while i < seen.len() {
        let v = seen[i];
        i += 1;
        for &w in d.out_neighbors(v) {
            if c.color(w) == gamma {
                seen.push(w);
            }
        }
    }
    seen.sort_unstable();
    Ok(seen)
}

/// Tree nodes whose level meets `verts`, sorted.
pub fn proj(d: &DagD, verts: &[usize]) -> Vec<usize> {
    let nodes: BTreeSet<usize> = verts.iter().map(|&v| d.node_of(v)).collect();
    nodes.into_iter().collect()
}

/// Signatures realized by paths ending at element roots.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Realized {
    /// `(start vertex, signature, end tree node)`.
    pub triples: BTreeSet<(usize, Vec<u32>, usize)>,
    /// Pairs of signatures of two paths with the same start vertex.
    pub pairs: BTreeSet<(Vec<u32>, Vec<u32>)>,
}

impl Realized {
    pub fn signatures(&self) -> BTreeSet<Vec<u32>> {
        self.triples.iter().map(|(_, s, _)| s.clone()).collect()
    }
}

/// Walks from every vertex of `D` along all directed paths and records the
/// signatures of those ending at a node that is the root of an element.
pub fn enumerate_realized(d: &DagD, c: &ColorCD, nd: &NormalizedDecomposition) -> Realized {
    let tree = nd.tree();
    let mut out = Realized::default();
    for start in 0..d.num_vertices() {
        let mut sigs_here = BTreeSet::new();
        let mut stack = vec![(start, vec![c.color(start)])];
        while let Some((v, sig)) = stack.pop() {
            let t = d.node_of(v);
            if nd.element_rooted_at(t).is_some() {
                out.triples.insert((start, sig.clone(), t));
                sigs_here.insert(sig.clone());
            }
            for &ch in tree.children(t) {
                let w = d.step(v, ch);
                let mut next = sig.clone();
                if *next.last().expect("nonempty") != c.color(w) {
                    next.push(c.color(w));
                }
                stack.push((w, next));
            }
        }
        for g in &sigs_here {
            for h in &sigs_here {
                out.pairs.insert((g.clone(), h.clone()));
            }
        }
    }
    out
}

/// Text dump: one line per D vertex, `<tree node> <key> <colour>`, 1-based nodes.
pub fn dump(d: &DagD, c: &ColorCD) -> String {
    let mut s = String::new();
    for (t, lvl) in d.level.iter().enumerate() {
        for &v in lvl {
            let _ = writeln!(s, "{} {} {}", t + 1, key_string(d.key(v)), c.color(v));
        }
    }
    s
}

/// Everything derived from a poset and its normalized decomposition.
#[derive(Clone, Debug)]
pub struct SignatureDag {
    pub coloring: ElementColoring,
    pub dag: DagD,
    pub cd: ColorCD,
}

impl SignatureDag {
    pub fn build(p: &Poset, nd: &NormalizedDecomposition) -> Result<SignatureDag> {
        let coloring = greedy_color(nd);
        let dag = build_d(p, nd, &coloring)?;
        let cd = color_d(&dag, nd.tree());
        Ok(SignatureDag { coloring, dag, cd })
    }

    /// The vertex of colour `gamma` at tree node `t`, if any.
    pub fn vertex_of_color(&self, t: usize, gamma: u32) -> Option<usize> {
        self.dag.level(t).iter().copied().find(|&v| self.cd.color(v) == gamma)
    }
}

impl fmt::Display for SignatureDag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&dump(&self.dag, &self.cd))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedec::{normalize, TreeDecomposition};

    fn setup(p: &Poset, bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> NormalizedDecomposition {
        normalize(p, &TreeDecomposition::new(p.len(), bags, edges)).unwrap()
    }

    #[test]
    fn greedy_on_chain_pair() {
        let p = Poset::chain(2);
        let nd = setup(&p, vec![vec![0], vec![0, 1]], vec![(0, 1)]);
        let c = greedy_color(&nd);
        assert_eq!(c.colors(), &[1, 2]);
        assert_eq!(rep(&nd, &c, 0, 1), Some(0));
        assert_eq!(rep(&nd, &c, 0, 2), None);
    }

    #[test]
    fn greedy_on_antichain() {
        let p = Poset::antichain(4);
        let nd = setup(&p, (0..4).map(|v| vec![v]).collect(), vec![(0, 1), (1, 2), (2, 3)]);
        assert!(greedy_color(&nd).colors().iter().all(|&c| c == 1));
    }

    #[test]
    fn vec_definition() {
        let p = Poset::chain(2);
        let nd = setup(&p, vec![vec![0], vec![0, 1], vec![]], vec![(0, 1), (1, 2)]);
        let c = greedy_color(&nd);
        let r1 = nd.root_of(1);
        assert_eq!(vec_of(&p, &nd, &c, 1, r1).unwrap(), vec![Rel::Gt, Rel::Eq]);
        assert_eq!(vec_of(&p, &nd, &c, 0, r1).unwrap(), vec![Rel::Eq, Rel::Lt]);
        let empty = (0..3).find(|&t| nd.bag(t).is_empty()).unwrap();
        assert_eq!(vec_of(&p, &nd, &c, 0, empty).unwrap(), vec![Rel::Star, Rel::Star]);
        assert!(matches!(
            vec_of(&p, &nd, &c, 1, nd.root_of(0)),
            Err(Error::PreconditionViolated { .. })
        ));
    }

    #[test]
    fn singleton_dag() {
        let p = Poset::antichain(1);
        let nd = setup(&p, vec![vec![0], vec![0], vec![]], vec![(0, 1), (1, 2)]);
        let s = SignatureDag::build(&p, &nd).unwrap();
        assert_eq!(s.dag.num_vertices(), 3);
        assert_eq!(s.dag.num_edges(), 2);
        check_color_cd(&s.dag, &s.cd).unwrap();
        let r = enumerate_realized(&s.dag, &s.cd, &nd);
        assert_eq!(r.triples.len(), 1);
        assert_eq!(r.signatures().into_iter().next().unwrap().len(), 1);
    }

    #[test]
    fn signatures_dedup() {
        let p = Poset::chain(3);
        let nd = setup(&p, vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        let s = SignatureDag::build(&p, &nd).unwrap();
        check_unique_out(&p, &nd, &s.coloring, &s.dag).unwrap();
        check_color_cd(&s.dag, &s.cd).unwrap();
        for v in 0..s.dag.num_vertices() {
            let t = s.dag.node_of(v);
            for &u in nd.tree().subtree(t) {
                let path = s.dag.follow(nd.tree(), v, u);
                let sig = signature_of_path(&s.dag, &s.cd, &path).unwrap();
                assert!(sig.windows(2).all(|w| w[0] > w[1]));
            }
        }
        assert!(matches!(
            signature_of_path(&s.dag, &s.cd, &[0, 0]),
            Err(Error::NotAPath(0, 0))
        ));
        let v = s.dag.level(nd.tree().root())[0];
        let g = s.cd.color(v);
        assert!(tree_of(&s.dag, &s.cd, v, g + 1).is_err());
        let tv = tree_of(&s.dag, &s.cd, v, g).unwrap();
        assert!(proj(&s.dag, &tv).contains(&nd.tree().root()));
    }
}

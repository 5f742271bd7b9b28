//! Families of pairwise disjoint subtrees of the decomposition tree, indexed
//! by a decreasing colour sequence `Γ` and a ternary string `α`.
//!
//! `F_(γ)` collects the projections of the colour-`γ` trees grown from the
//! sources of `D`. For a longer sequence `Γγ`, digit `0` restarts from `F_γ`,
//! while digits `1` and `2` are the two halves of the extension `F⁺`, which
//! grows each member of `F_Γ^α` along the edges where its last colour merges
//! into `γ`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::sigdag::{proj, tree_of, SignatureDag};
use crate::treedec::NormalizedDecomposition;

/// A subtree of the decomposition tree: its lowest node and its node set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Member {
    pub root: usize,
    /// Sorted tree nodes.
    pub nodes: Vec<usize>,
}

impl Member {
    pub fn contains(&self, t: usize) -> bool {
        self.nodes.binary_search(&t).is_ok()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeFamily {
    pub members: Vec<Member>,
}

impl TreeFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// First pair of members sharing a node, if any.
    pub fn overlap(&self, tree_size: usize) -> Option<(usize, usize)> {
        let mut owner = vec![usize::MAX; tree_size];
        for (i, m) in self.members.iter().enumerate() {
            for &t in &m.nodes {
                if owner[t] != usize::MAX {
                    return Some((owner[t], i));
                }
                owner[t] = i;
            }
        }
        None
    }

    /// Node to member index; meaningful for disjoint families.
    pub fn owner_map(&self, tree_size: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; tree_size];
        for (i, m) in self.members.iter().enumerate() {
            for &t in &m.nodes {
                owner[t] = Some(i);
            }
        }
        owner
    }
}

/// The intermediate family `F⁺` together with its split into two halves.
#[derive(Clone, Debug, Default)]
pub struct Extension {
    pub plus: TreeFamily,
    /// For each member of `F⁺`, the index of the member of `F_Γ^α` it grew from.
    pub parent: Vec<usize>,
    /// Half (1 or 2) of each member of `F⁺`.
    pub part: Vec<u8>,
    pub part1: TreeFamily,
    pub part2: TreeFamily,
}

impl Extension {
    /// Half containing the offspring of member `q` of the parent family, if it has one.
    pub fn part_of_parent(&self, q: usize) -> Option<u8> {
        self.parent.iter().position(|&p| p == q).map(|i| self.part[i])
    }
}

/// Family key: signature and ternary string, `|α| = |Γ| - 1`.
pub type FamilyKey = (Vec<u32>, Vec<u8>);

fn check_key(gamma: &[u32], alpha: &[u8]) -> Result<()> {
    if gamma.is_empty() {
        return Err(Error::MalformedKey("empty colour sequence".into()));
    }
    if alpha.len() + 1 != gamma.len() {
        return Err(Error::MalformedKey(format!(
            "ternary string has length {}, expected {}",
            alpha.len(),
            gamma.len() - 1
        )));
    }
    if gamma.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::MalformedKey(format!("{gamma:?} is not strictly decreasing")));
    }
    if let Some(d) = alpha.iter().find(|&&d| d > 2) {
        return Err(Error::MalformedKey(format!("digit {d} is not ternary")));
    }
    Ok(())
}

/// Lazily built, memoised families over one decomposition and its DAG.
pub struct Families<'a> {
    nd: &'a NormalizedDecomposition,
    sd: &'a SignatureDag,
    gamma_vertex: HashMap<(usize, u32), usize>,
    base: HashMap<u32, Rc<TreeFamily>>,
    memo: HashMap<FamilyKey, Rc<TreeFamily>>,
    ext: HashMap<(FamilyKey, u32), Rc<Extension>>,
}

impl<'a> Families<'a> {
    pub fn new(nd: &'a NormalizedDecomposition, sd: &'a SignatureDag) -> Self {
        let mut gamma_vertex = HashMap::new();
        for v in 0..sd.dag.num_vertices() {
            gamma_vertex.insert((sd.dag.node_of(v), sd.cd.color(v)), v);
        }
        Families {
            nd,
            sd,
            gamma_vertex,
            base: HashMap::new(),
            memo: HashMap::new(),
            ext: HashMap::new(),
        }
    }

    pub fn decomposition(&self) -> &NormalizedDecomposition {
        self.nd
    }

    pub fn signature_dag(&self) -> &SignatureDag {
        self.sd
    }

    /// The vertex of colour `gamma` in `D_t`.
    pub fn gamma_vertex(&self, t: usize, gamma: u32) -> Option<usize> {
        self.gamma_vertex.get(&(t, gamma)).copied()
    }

    /// No vertex of `D_t` has colour `gamma`.
    pub fn is_gamma_break(&self, t: usize, gamma: u32) -> bool {
        self.gamma_vertex(t, gamma).is_none()
    }

    /// `from` merges into `into` on the tree edge `(t, child)`: the vertex of
    /// colour `from` at `t` has its edge into the vertex of colour `into` at `child`.
    pub fn merges_into(&self, t: usize, child: usize, from: u32, into: u32) -> Result<bool> {
        if into >= from {
            return Err(Error::BadColorOrder { lower: into, upper: from });
        }
        debug_assert_eq!(self.nd.tree().parent(child), Some(t));
        Ok(match (self.gamma_vertex(t, from), self.gamma_vertex(child, into)) {
            (Some(d), Some(e)) => self.sd.dag.step(d, child) == e,
            _ => false,
        })
    }

    /// The colour-`gamma` chain is cut on the tree edge `(t, child)`: either
    /// `t` is a `gamma`-break or its `gamma` vertex leaves colour `gamma`.
    pub fn link_broken(&self, t: usize, child: usize, gamma: u32) -> bool {
        match self.gamma_vertex(t, gamma) {
            None => true,
            Some(d) => self.sd.cd.color(self.sd.dag.step(d, child)) != gamma,
        }
    }

    /// `F_γ`: projections of `tree(d, γ)` over the sources `d` of colour `γ`.
    pub fn base_family(&mut self, gamma: u32) -> Rc<TreeFamily> {
        if let Some(f) = self.base.get(&gamma) {
            return f.clone();
        }
        let dag = &self.sd.dag;
        let mut members = Vec::new();
        for v in 0..dag.num_vertices() {
            if dag.in_neighbors(v).is_empty() && self.sd.cd.color(v) == gamma {
                let verts = tree_of(dag, &self.sd.cd, v, gamma).expect("colour matches");
                members.push(Member {
                    root: dag.node_of(v),
                    nodes: proj(dag, &verts),
                });
            }
        }
        members.sort();
        let f = Rc::new(TreeFamily { members });
        self.base.insert(gamma, f.clone());
        f
    }

    /// `F⁺` grown from `family` (whose last colour is `last`) towards `gamma < last`.
    ///
    /// A member `Q` with root `r` is extended through every node `t` of `Q` and
    /// child `t'` outside `Q` such that the `gamma` chain is cut somewhere on
    /// `[r, t']` and `last` merges into `gamma` on `(t, t')`. The extension adds
    /// the path `[r, t']` and the projection of the `gamma` tree rooted at `t'`.
    pub fn extend_plus(&self, family: &TreeFamily, last: u32, gamma: u32) -> Result<(TreeFamily, Vec<usize>)> {
        if gamma >= last {
            return Err(Error::BadColorOrder { lower: gamma, upper: last });
        }
        let tree = self.nd.tree();
        let mut members = Vec::new();
        let mut parent = Vec::new();
        for (qi, q) in family.members.iter().enumerate() {
            // cut[t]: the gamma chain is cut somewhere on [r, t].
            let mut cut: HashMap<usize, bool> = HashMap::new();
            cut.insert(q.root, false);
            let mut grown: BTreeSet<usize> = BTreeSet::new();
            let mut queue = VecDeque::from([q.root]);
            while let Some(t) = queue.pop_front() {
                let here = cut[&t];
                for &ch in tree.children(t) {
                    let below = here || self.link_broken(t, ch, gamma);
                    if q.contains(ch) {
                        cut.insert(ch, below);
                        queue.push_back(ch);
                    } else if below && self.merges_into(t, ch, last, gamma)? {
                        grown.extend(tree.path_from_ancestor(q.root, ch));
                        let d = self.gamma_vertex(ch, gamma).expect("merge target exists");
                        let verts = tree_of(&self.sd.dag, &self.sd.cd, d, gamma)?;
                        grown.extend(proj(&self.sd.dag, &verts));
                    }
                }
            }
            if !grown.is_empty() {
                members.push(Member {
                    root: q.root,
                    nodes: grown.into_iter().collect(),
                });
                parent.push(qi);
            }
        }
        Ok((TreeFamily { members }, parent))
    }

    /// Properly 2-colours the intersection graph of `plus`, component by
    /// component, starting from the member with the smallest root in half 1.
    pub fn split_two(&self, plus: &TreeFamily) -> Result<Vec<u8>> {
        let m = plus.members.len();
        let mut at_node: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, q) in plus.members.iter().enumerate() {
            for &t in &q.nodes {
                at_node.entry(t).or_default().push(i);
            }
        }
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
        for group in at_node.values() {
            for &a in group {
                for &b in group {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&i| (plus.members[i].root, i));
        let mut part = vec![0u8; m];
        for &s in &order {
            if part[s] != 0 {
                continue;
            }
            part[s] = 1;
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                for &b in &adj[a] {
                    if part[b] == 0 {
                        part[b] = 3 - part[a];
                        queue.push_back(b);
                    } else if part[b] == part[a] {
                        return Err(Error::OddCycle(b));
                    }
                }
            }
        }
        Ok(part)
    }

    fn extension(&mut self, key: &FamilyKey, gamma: u32) -> Result<Rc<Extension>> {
        let memo_key = (key.clone(), gamma);
        if let Some(e) = self.ext.get(&memo_key) {
            return Ok(e.clone());
        }
        let family = self.family(&key.0, &key.1)?;
        let last = *key.0.last().expect("nonempty");
        let (plus, parent) = self.extend_plus(&family, last, gamma)?;
        let part = self.split_two(&plus)?;
        let pick = |want: u8| TreeFamily {
            members: plus
                .members
                .iter()
                .zip(&part)
                .filter(|(_, &p)| p == want)
                .map(|(q, _)| q.clone())
                .collect(),
        };
        let e = Rc::new(Extension {
            part1: pick(1),
            part2: pick(2),
            plus,
            parent,
            part,
        });
        self.ext.insert(memo_key, e.clone());
        Ok(e)
    }

    /// The extension of `F_Γ^α` towards colour `gamma`.
    pub fn extension_of(&mut self, gamma_seq: &[u32], alpha: &[u8], gamma: u32) -> Result<Rc<Extension>> {
        check_key(gamma_seq, alpha)?;
        self.extension(&(gamma_seq.to_vec(), alpha.to_vec()), gamma)
    }

    /// `F_Γ^α`, memoised.
    pub fn family(&mut self, gamma_seq: &[u32], alpha: &[u8]) -> Result<Rc<TreeFamily>> {
        check_key(gamma_seq, alpha)?;
        let key: FamilyKey = (gamma_seq.to_vec(), alpha.to_vec());
        if let Some(f) = self.memo.get(&key) {
            return Ok(f.clone());
        }
        let l = gamma_seq.len();
        let f = if l == 1 {
            self.base_family(gamma_seq[0])
        } else {
            let gamma = gamma_seq[l - 1];
            match alpha[l - 2] {
                0 => self.base_family(gamma),
                digit => {
                    let parent: FamilyKey = (gamma_seq[..l - 1].to_vec(), alpha[..l - 2].to_vec());
                    let e = self.extension(&parent, gamma)?;
                    Rc::new(if digit == 1 { e.part1.clone() } else { e.part2.clone() })
                }
            }
        };
        self.memo.insert(key, f.clone());
        Ok(f)
    }

    /// Keys built so far, for sweeping invariants.
    pub fn built_keys(&self) -> Vec<FamilyKey> {
        let mut keys: Vec<FamilyKey> = self.memo.keys().cloned().collect();
        keys.sort();
        keys
    }

    pub fn built_extensions(&self) -> Vec<Rc<Extension>> {
        let mut keys: Vec<&(FamilyKey, u32)> = self.ext.keys().collect();
        keys.sort();
        keys.into_iter().map(|k| self.ext[k].clone()).collect()
    }
}

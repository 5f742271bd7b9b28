//! Boolean realizers: permutations of the elements plus a branching program
//! over their order bits that decides `x <= y`.
//!
//! [`Construction::build`] assembles the program for a poset with a tree
//! decomposition of its cover graph. The top level tests equality, then asks
//! for every pair of signatures `(Γ, Δ)` that starts at a common vertex of the
//! meet level whether the path to `root(x)` has signature `Γ` and ends above
//! `x`, and the path to `root(y)` has signature `Δ` and ends below `y`.
//! Whether a path with signature `Γ` leads from the meet to `root(x)` is
//! decided by the subprogram `B_Γ`, a walk through the families of subtrees
//! driven by colour detections.
//!
//! The program is pruned to the routes that real queries take: subprograms
//! only exist for signatures realized from a meet, and inside `B_Γ` only the
//! nodes that some valid pair reaches are built. Unreached nodes answer 0.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bp::{
    set_membership_build, BranchingProgram, ColorDetector, EdgeColor, EdgeColoring, Evaluator, Node, NodeId,
    OrderBits, Permutation, ProgramBuilder, Side,
};
use crate::error::{Error, Result};
use crate::families::{Extension, Families, FamilyKey, TreeFamily};
use crate::poset::Poset;
use crate::sigdag::{Rel, SignatureDag};
use crate::tree::RootedTree;
use crate::treedec::{normalize, NormalizedDecomposition, TreeDecomposition};

pub const FORMAT_VERSION: u32 = 1;

/// Descriptive numbers recorded alongside a realizer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub construction: String,
    pub n: usize,
    pub tree_nodes: usize,
    pub d_vertices: usize,
    /// Distinct signatures with a subprogram `B_Γ`.
    pub signatures: usize,
    /// Children `N_{Γ,Δ}` of the root.
    pub signature_pairs: usize,
    pub permutations: usize,
    pub program_nodes: usize,
}

/// Permutations of `0..n` and a program over their order bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realizer {
    k: usize,
    permutations: Vec<Permutation>,
    program: BranchingProgram,
    metadata: Metadata,
}

impl Realizer {
    pub fn new(k: usize, permutations: Vec<Permutation>, program: BranchingProgram, metadata: Metadata) -> Result<Self> {
        let n = permutations.first().map_or(0, Permutation::len);
        if let Some(p) = permutations.iter().find(|p| !p.is_permutation_of(n)) {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: p.len(),
            });
        }
        if program.num_bits() != permutations.len() {
            return Err(Error::BitLengthMismatch {
                expected: permutations.len(),
                actual: program.num_bits(),
            });
        }
        program.check()?;
        Ok(Realizer {
            k,
            permutations,
            program,
            metadata,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_elements(&self) -> usize {
        self.permutations.first().map_or(0, Permutation::len)
    }

    pub fn permutations(&self) -> &[Permutation] {
        &self.permutations
    }

    pub fn program(&self) -> &BranchingProgram {
        &self.program
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn count_permutations(&self) -> usize {
        self.permutations.len()
    }

    pub fn bits(&self, x: usize, y: usize) -> Result<OrderBits> {
        let n = self.num_elements();
        for id in [x, y] {
            if id >= n {
                return Err(Error::IdOutOfRange { id, n });
            }
        }
        Ok(OrderBits::of_pair(&self.permutations, x, y))
    }

    /// Whether `x <= y`, decided from the order bits alone.
    pub fn query(&self, x: usize, y: usize) -> Result<bool> {
        self.query_bits(&self.bits(x, y)?)
    }

    pub fn query_bits(&self, bits: &OrderBits) -> Result<bool> {
        self.program.evaluate(bits)
    }

    /// Scratch space for many queries in a row.
    pub fn evaluator(&self) -> Evaluator<'_> {
        Evaluator::new(&self.program)
    }

    pub fn serialize(&self) -> String {
        let file = RealizerFile {
            version: FORMAT_VERSION,
            k: self.k,
            permutations: self
                .permutations
                .iter()
                .map(|p| p.as_slice().iter().map(|&z| z + 1).collect())
                .collect(),
            program: self.program.clone(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string(&file).expect("realizer serializes")
    }

    pub fn deserialize(text: &str) -> Result<Realizer> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::CorruptPayload(e.to_string()))?;
        let found = value
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::CorruptPayload("missing version".into()))?;
        if found != u64::from(FORMAT_VERSION) {
            return Err(Error::VersionMismatch {
                found: found as u32,
                expected: FORMAT_VERSION,
            });
        }
        let file: RealizerFile = serde_json::from_value(value).map_err(|e| Error::CorruptPayload(e.to_string()))?;
        let mut permutations = Vec::with_capacity(file.permutations.len());
        for seq in file.permutations {
            if seq.contains(&0) {
                return Err(Error::CorruptPayload("element id 0".into()));
            }
            permutations.push(Permutation::new(seq.into_iter().map(|z| z - 1).collect()).map_err(|e| Error::CorruptPayload(e.to_string()))?);
        }
        Realizer::new(file.k, permutations, file.program, file.metadata).map_err(|e| Error::CorruptPayload(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct RealizerFile {
    version: u32,
    k: usize,
    permutations: Vec<Vec<usize>>,
    program: BranchingProgram,
    metadata: Metadata,
}

/// `6·4^(5^(k+1)) + 4·2^(5^(k+1)) − 6`. The result has about `2·5^(k+1)` bits,
/// so this is only practical for small `k`; see [`within_paper_bound`].
pub fn paper_bound(k: u32) -> BigUint {
    let e = 5u64.pow(k + 1);
    let two_e = BigUint::from(1u8) << e;
    BigUint::from(6u8) * &two_e * &two_e + BigUint::from(4u8) * two_e - BigUint::from(6u8)
}

/// `log2` of [`paper_bound`], without materializing it.
pub fn paper_bound_log2(k: u32) -> f64 {
    let e = 5f64.powi(k as i32 + 1);
    2.0 * e + 6f64.log2()
}

/// Whether `count <= paper_bound(k)`.
pub fn within_paper_bound(count: usize, k: u32) -> bool {
    // From k = 2 on the bound exceeds 2^250.
    k >= 2 || BigUint::from(count) <= paper_bound(k)
}

/// Permutation budget for one `B_Γ`: `3^(ℓ+1) − 1`.
pub fn b_gamma_budget(len: usize) -> u128 {
    3u128.saturating_pow(len as u32 + 1) - 1
}

/// The permutation of elements induced by a permutation of tree nodes,
/// restricted to element roots.
pub fn induce_perm(p: &Permutation, nd: &NormalizedDecomposition) -> Permutation {
    let seq = p.as_slice().iter().filter_map(|&t| nd.element_rooted_at(t)).collect();
    Permutation::new(seq).expect("roots are distinct")
}

/// `S^>_γ` and `S^<_γ`, indexed by colour `γ` (slot 0 unused).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MembershipSets {
    pub above: Vec<Vec<usize>>,
    pub below: Vec<Vec<usize>>,
}

impl MembershipSets {
    /// `z ∈ S^>_γ` when the colour-`γ` vertex of `D_root(z)` has `>` or `=` at
    /// the colour of `z`; dually for `S^<_γ` with `<` or `=`.
    pub fn compute(nd: &NormalizedDecomposition, sd: &SignatureDag) -> MembershipSets {
        let colors = sd.cd.max_color() as usize + 1;
        let mut above = vec![Vec::new(); colors];
        let mut below = vec![Vec::new(); colors];
        for z in 0..nd.num_elements() {
            let slot = sd.coloring.color(z) as usize - 1;
            for &v in sd.dag.level(nd.root_of(z)) {
                let gamma = sd.cd.color(v) as usize;
                match sd.dag.key(v)[slot] {
                    Rel::Gt => above[gamma].push(z),
                    Rel::Lt => below[gamma].push(z),
                    Rel::Eq => {
                        above[gamma].push(z);
                        below[gamma].push(z);
                    }
                    _ => {}
                }
            }
        }
        MembershipSets { above, below }
    }
}

/// What was built for one signature `Γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BGammaInfo {
    pub root: NodeId,
    /// Bits read by the subprogram, the shared `π_L`, `π_R` included.
    pub bits: BTreeSet<u32>,
}

/// A realizer with the intermediate products it was built from.
pub struct Construction {
    pub poset_size: usize,
    pub nd: NormalizedDecomposition,
    pub sd: SignatureDag,
    pub realizer: Realizer,
    pub b_gamma: BTreeMap<Vec<u32>, BGammaInfo>,
    /// Every family that was needed, by key.
    pub families: BTreeMap<FamilyKey, TreeFamily>,
    pub extensions: Vec<Extension>,
    /// Indices of the bits `π_L` and `π_R`.
    pub shared_bits: (u32, u32),
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    /// Also build `B_Γ` for these signatures, e.g. every realized one, even
    /// when no query uses them.
    pub extra_signatures: Vec<Vec<u32>>,
}

impl Construction {
    pub fn build(p: &Poset, td: &TreeDecomposition) -> Result<Construction> {
        Self::build_with(p, td, &BuildOptions::default())
    }

    pub fn build_with(p: &Poset, td: &TreeDecomposition, opts: &BuildOptions) -> Result<Construction> {
        let nd = normalize(p, td)?;
        let sd = SignatureDag::build(p, &nd)?;
        let mut b = Builder::new(&nd, &sd);
        let (realizer, b_gamma, shared_bits) = b.run(opts)?;
        let families = b
            .fam
            .built_keys()
            .into_iter()
            .map(|key| {
                let f = b.fam.family(&key.0, &key.1).expect("built");
                (key, (*f).clone())
            })
            .collect();
        let extensions = b.fam.built_extensions().into_iter().map(|e| (*e).clone()).collect();
        drop(b);
        Ok(Construction {
            poset_size: p.len(),
            nd,
            sd,
            realizer,
            b_gamma,
            families,
            extensions,
            shared_bits,
        })
    }

    /// Evaluates `B_Γ` for the pair `(x, y)`.
    pub fn eval_b_gamma(&self, gamma: &[u32], x: usize, y: usize) -> Result<bool> {
        let info = self
            .b_gamma
            .get(gamma)
            .ok_or_else(|| Error::UnrealizedSignature(gamma.to_vec()))?;
        let bits = self.realizer.bits(x, y)?;
        Evaluator::new(self.realizer.program()).eval_at(info.root, &bits)
    }
}

/// Builds a realizer from a poset and a tree decomposition of its cover graph.
pub fn build(p: &Poset, td: &TreeDecomposition) -> Result<Realizer> {
    Ok(Construction::build(p, td)?.realizer)
}

struct PermTable {
    perms: Vec<Permutation>,
    index: HashMap<Vec<usize>, u32>,
}

impl PermTable {
    fn add(&mut self, p: Permutation) -> u32 {
        if let Some(&i) = self.index.get(p.as_slice()) {
            return i;
        }
        let i = self.perms.len() as u32;
        self.index.insert(p.as_slice().to_vec(), i);
        self.perms.push(p);
        i
    }
}

type Visit = (Vec<u32>, Vec<u8>);

struct Builder<'a> {
    nd: &'a NormalizedDecomposition,
    sd: &'a SignatureDag,
    fam: Families<'a>,
    det: ColorDetector<'a>,
    table: PermTable,
    prog: ProgramBuilder,
    shared: (u32, u32),
    /// The identity and its reversal; both bits hold only for `x = y`.
    eq: (u32, u32),
    tools: HashMap<EdgeColoring, NodeId>,
    owners: HashMap<FamilyKey, Rc<Vec<Option<usize>>>>,
    visited: HashSet<Visit>,
}

impl<'a> Builder<'a> {
    fn new(nd: &'a NormalizedDecomposition, sd: &'a SignatureDag) -> Self {
        let det = ColorDetector::new(nd.tree());
        let mut table = PermTable {
            perms: Vec::new(),
            index: HashMap::new(),
        };
        let n = nd.num_elements();
        let eq = (table.add(Permutation::identity(n)), table.add(Permutation::identity(n).reverse()));
        let (l, r) = det.dfs_orders();
        let shared = (table.add(induce_perm(&l, nd)), table.add(induce_perm(&r, nd)));
        Builder {
            nd,
            sd,
            fam: Families::new(nd, sd),
            det,
            table,
            prog: ProgramBuilder::new(),
            shared,
            eq,
            tools: HashMap::new(),
            owners: HashMap::new(),
            visited: HashSet::new(),
        }
    }

    fn run(&mut self, opts: &BuildOptions) -> Result<(Realizer, BTreeMap<Vec<u32>, BGammaInfo>, (u32, u32))> {
        let nd = self.nd;
        let tree = nd.tree();
        let n = nd.num_elements();
        let dag = &self.sd.dag;

        // Ordered pairs of distinct elements grouped by the meet of their roots.
        let mut by_meet: Vec<Vec<(usize, usize)>> = vec![Vec::new(); tree.len()];
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    let (rx, ry) = (nd.root_of(x), nd.root_of(y));
                    by_meet[tree.meet(rx, ry)].push((rx, ry));
                }
            }
        }

        let mut sig_ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut sigs: Vec<Vec<u32>> = Vec::new();
        let mut pairs: BTreeSet<(u32, u32)> = BTreeSet::new();
        let mut shapes: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut sig_at = vec![u32::MAX; tree.len()];
        for (m, group) in by_meet.iter().enumerate() {
            if group.is_empty() {
                continue;
            }
            for &(rx, _) in group {
                if rx != m {
                    shapes.insert((m, rx));
                }
            }
            for &d in dag.level(m) {
                // Signatures from d to every node of the subtree of m, in preorder.
                let mut cur: Vec<(usize, Vec<u32>)> = vec![(d, vec![self.sd.cd.color(d)])];
                let mut vert_at = HashMap::new();
                vert_at.insert(m, 0usize);
                for &t in tree.subtree(m) {
                    let (v, sig) = cur[vert_at[&t]].clone();
                    let id = *sig_ids.entry(sig.clone()).or_insert_with(|| {
                        sigs.push(sig.clone());
                        (sigs.len() - 1) as u32
                    });
                    sig_at[t] = id;
                    for &ch in tree.children(t) {
                        let w = dag.step(v, ch);
                        let mut next = sig.clone();
                        let c = self.sd.cd.color(w);
                        if *next.last().expect("nonempty") != c {
                            next.push(c);
                        }
                        vert_at.insert(ch, cur.len());
                        cur.push((w, next));
                    }
                }
                for &(rx, ry) in group {
                    pairs.insert((sig_at[rx], sig_at[ry]));
                }
            }
        }

        for &(m, u) in &shapes {
            for &d in dag.level(m) {
                self.simulate(m, u, d)?;
            }
        }

        let mut needed: BTreeSet<Vec<u32>> = BTreeSet::new();
        for &(g, h) in &pairs {
            needed.insert(sigs[g as usize].clone());
            needed.insert(sigs[h as usize].clone());
        }
        needed.extend(opts.extra_signatures.iter().cloned());

        let mut b_gamma = BTreeMap::new();
        for gamma in &needed {
            let root = self.build_b_gamma(gamma)?;
            let bits = read_bits(&self.prog, root);
            b_gamma.insert(gamma.clone(), BGammaInfo { root, bits });
        }

        let sets = MembershipSets::compute(nd, self.sd);
        let domain: Vec<usize> = (0..n).collect();
        let (l, r) = self.shared;
        let (l, r) = (l as usize, r as usize);
        let mut nx: HashMap<u32, NodeId> = HashMap::new();
        let mut ny: HashMap<u32, NodeId> = HashMap::new();
        let mut children = Vec::with_capacity(pairs.len() + 1);
        let eq_id = self.prog.bit(self.eq.0 as usize);
        let eq_rev = self.prog.bit(self.eq.1 as usize);
        children.push(self.prog.all([eq_id, eq_rev]));
        for &(g, h) in &pairs {
            let x_node = match nx.get(&g) {
                Some(&id) => id,
                None => {
                    let gamma = &sigs[g as usize];
                    let last = *gamma.last().expect("nonempty") as usize;
                    let mem = self.membership(&domain, &sets.above[last], Side::X)?;
                    let (bl, br) = (self.prog.bit(l), self.prog.bit(r));
                    let x_low = self.prog.all([bl, br]);
                    let case1 = self.prog.constant(gamma.len() == 1);
                    let case2 = b_gamma[gamma].root;
                    let cases = self.prog.ite(x_low, case1, case2);
                    let id = self.prog.all([mem, cases]);
                    nx.insert(g, id);
                    id
                }
            };
            let y_node = match ny.get(&h) {
                Some(&id) => id,
                None => {
                    let delta = &sigs[h as usize];
                    let last = *delta.last().expect("nonempty") as usize;
                    let mem = self.membership(&domain, &sets.below[last], Side::Y)?;
                    let (bl, br) = (self.prog.bit(l), self.prog.bit(r));
                    let (nl, nr) = (self.prog.not(bl), self.prog.not(br));
                    let y_low = self.prog.all([nl, nr]);
                    let case1 = self.prog.constant(delta.len() == 1);
                    let case2 = self.prog.swap(b_gamma[delta].root);
                    let cases = self.prog.ite(y_low, case1, case2);
                    let id = self.prog.all([mem, cases]);
                    ny.insert(h, id);
                    id
                }
            };
            children.push(self.prog.all([x_node, y_node]));
        }
        let root = self.prog.any(children);

        let prog = std::mem::take(&mut self.prog);
        let program_nodes = prog.len();
        let perms = std::mem::take(&mut self.table.perms);
        let program = prog.finish(perms.len(), root)?;
        let metadata = Metadata {
            construction: "tree-decomposition".into(),
            n,
            tree_nodes: tree.len(),
            d_vertices: dag.num_vertices(),
            signatures: needed.len(),
            signature_pairs: pairs.len(),
            permutations: perms.len(),
            program_nodes,
        };
        let realizer = Realizer::new(nd.width(), perms, program, metadata)?;
        Ok((realizer, b_gamma, self.shared))
    }

    fn membership(&mut self, domain: &[usize], set: &[usize], side: Side) -> Result<NodeId> {
        let perms = set_membership_build(domain, set)?;
        let bits = perms.map(|p| self.table.add(p) as usize);
        Ok(self.prog.membership(bits, side))
    }

    fn owner(&mut self, gamma: &[u32], alpha: &[u8]) -> Result<Rc<Vec<Option<usize>>>> {
        let key: FamilyKey = (gamma.to_vec(), alpha.to_vec());
        if let Some(o) = self.owners.get(&key) {
            return Ok(o.clone());
        }
        let f = self.fam.family(gamma, alpha)?;
        let o = Rc::new(f.owner_map(self.nd.tree().len()));
        self.owners.insert(key, o.clone());
        Ok(o)
    }

    /// Follows the route of `B_S` for the path from `d` (at `m`) up to `u`,
    /// where `S` is that path's signature, and marks every node it reaches.
    ///
    /// Also checks that the member of `F_{S_i}^α` containing `m` covers the
    /// path exactly up to the end of its `i`-th colour segment.
    fn simulate(&mut self, m: usize, u: usize, d: usize) -> Result<()> {
        let tree = self.nd.tree();
        let path = tree.path_from_ancestor(m, u);
        let verts = self.sd.dag.follow(tree, d, u);
        let colors: Vec<u32> = verts.iter().map(|&v| self.sd.cd.color(v)).collect();
        let mut sig = vec![colors[0]];
        let mut seg_end = Vec::new();
        for (j, &c) in colors.iter().enumerate().skip(1) {
            if c != *sig.last().expect("nonempty") {
                sig.push(c);
                seg_end.push(j - 1);
            }
        }
        seg_end.push(path.len() - 1);

        let mut alpha: Vec<u8> = Vec::new();
        for i in 0..sig.len() {
            let prefix = &sig[..=i];
            self.visited.insert((prefix.to_vec(), alpha.clone()));
            let owner = self.owner(prefix, &alpha)?;
            let q = owner[m].ok_or_else(|| {
                Error::InvariantViolated(format!("meet {m} lies in no member of family {prefix:?}/{alpha:?}"))
            })?;
            let end = path[seg_end[i]];
            let next = path.get(seg_end[i] + 1).copied();
            if owner[end] != Some(q) || next.is_some_and(|t| owner[t] == Some(q)) {
                return Err(Error::InvariantViolated(format!(
                    "family {prefix:?}/{alpha:?} does not end where colour {} does on the path {m}..{u}",
                    sig[i]
                )));
            }
            let Some(t_next) = next else { break };
            let gamma = sig[i + 1];
            let cut = path
                .windows(2)
                .take_while(|w| w[0] != t_next)
                .any(|w| self.fam.link_broken(w[0], w[1], gamma));
            let digit = if cut {
                let e = self.fam.extension_of(prefix, &alpha, gamma)?;
                e.part_of_parent(q).ok_or_else(|| {
                    Error::InvariantViolated(format!("member {q} of {prefix:?}/{alpha:?} has no offspring towards {gamma}"))
                })?
            } else {
                0
            };
            alpha.push(digit);
        }
        Ok(())
    }

    fn tool(&mut self, colors: EdgeColoring) -> NodeId {
        if let Some(&id) = self.tools.get(&colors) {
            return id;
        }
        let [a1, a2, a2m] = self.det.fresh(&colors);
        let bits = [
            self.shared.0 as usize,
            self.shared.1 as usize,
            self.table.add(induce_perm(&a1, self.nd)) as usize,
            self.table.add(induce_perm(&a2, self.nd)) as usize,
            self.table.add(induce_perm(&a2m, self.nd)) as usize,
        ];
        let id = self.prog.color_detect(bits, Side::X);
        self.tools.insert(colors, id);
        id
    }

    /// Tree edges leaving a member: `(t, child)` with `t` inside, `child` outside.
    fn exit_edges(&self, f: &TreeFamily) -> Vec<(usize, usize)> {
        let tree = self.nd.tree();
        let owner = f.owner_map(tree.len());
        let mut out = Vec::new();
        for (qi, q) in f.members.iter().enumerate() {
            for &t in &q.nodes {
                for &ch in tree.children(t) {
                    if owner[ch] != Some(qi) {
                        out.push((t, ch));
                    }
                }
            }
        }
        out
    }

    fn build_b_gamma(&mut self, gamma: &[u32]) -> Result<NodeId> {
        let Some(inner) = self.build_n(gamma, 1, &mut Vec::new())? else {
            return Ok(self.prog.constant(false));
        };
        if self.prog.node(inner) == &(Node::Const { value: false }) {
            return Ok(inner);
        }
        let base = self.fam.base_family(gamma[0]);
        let colors = red_below(self.nd.tree(), base.members.iter().map(|q| q.nodes.as_slice()));
        let root_tool = self.tool(colors);
        Ok(self.prog.all([root_tool, inner]))
    }

    /// `N_{i,α}`, or `None` when no valid pair reaches it.
    fn build_n(&mut self, gamma: &[u32], i: usize, alpha: &mut Vec<u8>) -> Result<Option<NodeId>> {
        if !self.visited.contains(&(gamma[..i].to_vec(), alpha.clone())) {
            return Ok(None);
        }
        let tree = self.nd.tree();
        let family = self.fam.family(&gamma[..i], alpha)?;
        if i == gamma.len() {
            // Accept when the meet and root(x) share a member.
            let owner = family.owner_map(tree.len());
            let mut c = EdgeColoring::uncolored(tree.len());
            for t in 0..tree.len() {
                if let Some(p) = tree.parent(t) {
                    if owner[t].is_none() || owner[t] != owner[p] {
                        c.set(t, EdgeColor::Red);
                    }
                }
            }
            let tool = self.tool(c);
            return Ok(Some(self.prog.not(tool)));
        }

        let mut child = |b: &mut Self, digit: u8| -> Result<Option<NodeId>> {
            alpha.push(digit);
            let r = b.build_n(gamma, i + 1, alpha);
            alpha.pop();
            r
        };
        let n0 = child(self, 0)?;
        let n1 = child(self, 1)?;
        let n2 = child(self, 2)?;
        let (from, into) = (gamma[i - 1], gamma[i]);

        let broken = match (n1, n2) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (Some(a), Some(b)) if a == b => Some(a),
            (Some(a), Some(b)) => {
                let e = self.fam.extension_of(&gamma[..i], alpha, into)?;
                let part1 = e.parent.iter().zip(&e.part).filter(|(_, &p)| p == 1).map(|(&q, _)| q);
                let colors = red_below(tree, part1.map(|q| family.members[q].nodes.as_slice()));
                let tool = self.tool(colors);
                Some(self.prog.ite(tool, a, b))
            }
        };
        let exits = self.exit_edges(&family);
        let cont = match (broken, n0) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (Some(a), Some(b)) if a == b => Some(a),
            (Some(a), Some(b)) => {
                let mut c = EdgeColoring::uncolored(tree.len());
                for &(_, ch) in &exits {
                    c.set(ch, EdgeColor::Green);
                }
                for t in 0..tree.len() {
                    if let Some(p) = tree.parent(t) {
                        if self.fam.link_broken(p, t, into) {
                            c.set(t, EdgeColor::Red);
                        }
                    }
                }
                let tool = self.tool(c);
                Some(self.prog.ite(tool, a, b))
            }
        };
        let Some(cont) = cont else {
            return Ok(Some(self.prog.constant(false)));
        };
        if self.prog.node(cont) == &(Node::Const { value: false }) {
            return Ok(Some(cont));
        }
        let mut c = EdgeColoring::uncolored(tree.len());
        for &(t, ch) in &exits {
            let red = self.fam.merges_into(t, ch, from, into)?;
            c.set(ch, if red { EdgeColor::Red } else { EdgeColor::Green });
        }
        let step1 = self.tool(c);
        Ok(Some(self.prog.all([step1, cont])))
    }
}

/// RED on every child edge of the given nodes, GREEN elsewhere.
fn red_below<'n>(tree: &RootedTree, groups: impl Iterator<Item = &'n [usize]>) -> EdgeColoring {
    let mut c = EdgeColoring::filled(tree.len(), EdgeColor::Green);
    for nodes in groups {
        for &t in nodes {
            for &ch in tree.children(t) {
                c.set(ch, EdgeColor::Red);
            }
        }
    }
    c
}

fn read_bits(prog: &ProgramBuilder, root: NodeId) -> BTreeSet<u32> {
    let mut seen = HashSet::new();
    let mut stack = vec![root];
    let mut bits = BTreeSet::new();
    while let Some(id) = stack.pop() {
        if !seen.insert(id) {
            continue;
        }
        let node = prog.node(id);
        bits.extend(node.read_bits());
        stack.extend(node.children());
    }
    bits
}

/// Four permutations for the standard example `S_n` (`a_i` is `i − 1`,
/// `b_i` is `n + i − 1`):
///
/// * `L1 = a1 b1 a2 b2 … an bn`, `L2 = b1 a1 b2 a2 … bn an`,
/// * `L3 = a1 … an bn … b1`, `L4 = an … a1 b1 … bn`,
///
/// with `x <= y` iff `L3 ∧ L4 ∧ ¬(L1 ∧ ¬L2)`. `L3 ∧ L4` holds exactly for
/// `x = y` and for `x = a_i, y = b_j`; among those, `L1 ∧ ¬L2` singles out
/// `i = j`.
pub fn standard_example_realizer(n: usize) -> Result<Realizer> {
    if n < 2 {
        return Err(Error::NTooSmall { n, min: 2 });
    }
    let a = |i: usize| i;
    let b = |i: usize| n + i;
    let l1: Vec<usize> = (0..n).flat_map(|i| [a(i), b(i)]).collect();
    let l2: Vec<usize> = (0..n).flat_map(|i| [b(i), a(i)]).collect();
    let l3: Vec<usize> = (0..n).map(a).chain((0..n).rev().map(b)).collect();
    let l4: Vec<usize> = (0..n).rev().map(a).chain((0..n).map(b)).collect();
    let perms = [l1, l2, l3, l4]
        .into_iter()
        .map(Permutation::new)
        .collect::<Result<Vec<_>>>()?;
    let mut pb = ProgramBuilder::new();
    let (b1, b2, b3, b4) = (pb.bit(0), pb.bit(1), pb.bit(2), pb.bit(3));
    let not2 = pb.not(b2);
    let same = pb.all([b1, not2]);
    let differ = pb.not(same);
    let root = pb.all([b3, b4, differ]);
    let program_nodes = pb.len();
    let program = pb.finish(4, root)?;
    let metadata = Metadata {
        construction: "standard-example".into(),
        n: 2 * n,
        permutations: 4,
        program_nodes,
        ..Metadata::default()
    };
    Realizer::new(n - 1, perms, program, metadata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn check_all(p: &Poset, r: &Realizer) {
        for x in 0..p.len() {
            for y in 0..p.len() {
                assert_eq!(r.query(x, y).unwrap(), p.leq(x, y), "pair ({x}, {y})");
            }
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(paper_bound(0), BigUint::from(6266u32));
        let e = BigUint::from(1u8) << 25u32;
        assert_eq!(paper_bound(1), BigUint::from(6u8) * &e * &e + BigUint::from(4u8) * e - BigUint::from(6u8));
        assert!(within_paper_bound(6266, 0));
        assert!(!within_paper_bound(6267, 0));
        assert_eq!(b_gamma_budget(1), 8);
    }

    #[test]
    fn induced_order() {
        let g = generators::chain(4);
        let nd = normalize(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
        let p = Permutation::identity(nd.tree().len());
        let ind = induce_perm(&p, &nd);
        assert!(ind.is_permutation_of(4));
        assert_eq!(induce_perm(&p.reverse(), &nd), ind.reverse());
    }

    #[test]
    fn small_instances() {
        for g in [generators::chain(3), generators::antichain(10), generators::standard_example(5).unwrap()] {
            let r = build(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
            check_all(&g.poset, &r);
        }
    }

    #[test]
    fn query_errors() {
        let g = generators::chain(3);
        let r = build(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
        assert!(matches!(r.query(0, 3), Err(Error::IdOutOfRange { id: 3, n: 3 })));
        assert!(matches!(
            r.query_bits(&OrderBits(vec![true])),
            Err(Error::BitLengthMismatch { .. })
        ));
    }

    #[test]
    fn round_trip() {
        let g = generators::standard_example(4).unwrap();
        let r = build(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
        let text = r.serialize();
        let back = Realizer::deserialize(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.serialize(), text);
        assert!(matches!(
            Realizer::deserialize(&text[..text.len() / 2]),
            Err(Error::CorruptPayload(_))
        ));
        let bumped = text.replacen("\"version\":1", "\"version\":9", 1);
        assert!(matches!(
            Realizer::deserialize(&bumped),
            Err(Error::VersionMismatch { found: 9, .. })
        ));
    }

    #[test]
    fn standard_realizer_small() {
        for n in 2..=8 {
            let r = standard_example_realizer(n).unwrap();
            let p = generators::standard_example(n).unwrap().poset;
            assert_eq!(r.count_permutations(), 4);
            check_all(&p, &r);
        }
        assert!(standard_example_realizer(1).is_err());
    }
}

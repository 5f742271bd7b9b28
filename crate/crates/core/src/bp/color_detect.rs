//! Detecting the colour of the first coloured edge on a tree path from five
//! order bits.
//!
//! Given a rooted, ordered tree whose edges are RED, GREEN or uncoloured, the
//! five permutations are the left-to-right and right-to-left preorders, one
//! permutation for the "y below x" case, and one each for "x left of y" and
//! its mirror image. Together they reveal whether the first coloured edge on
//! the path from `x ∧ y` up to `x` is RED.

use super::perm::Permutation;
use super::program::{BranchingProgram, ProgramBuilder, Side};
use crate::tree::RootedTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum EdgeColor {
    #[default]
    Uncolored,
    Red,
    Green,
}

/// Colours of tree edges, indexed by the child endpoint. The root's slot is unused.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeColoring(Vec<EdgeColor>);

impl EdgeColoring {
    pub fn uncolored(nodes: usize) -> Self {
        EdgeColoring(vec![EdgeColor::Uncolored; nodes])
    }

    pub fn filled(nodes: usize, color: EdgeColor) -> Self {
        EdgeColoring(vec![color; nodes])
    }

    /// Colour of the edge from the parent of `child` to `child`.
    pub fn get(&self, child: usize) -> EdgeColor {
        self.0[child]
    }

    pub fn set(&mut self, child: usize, color: EdgeColor) {
        self.0[child] = color;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelPos {
    YBelowX,
    XLeftOfY,
    YLeftOfX,
    XBelowY,
}

/// Relative position of `x != y` from their order bits in `pi_L` and `pi_R`.
pub fn rel_pos(bit_l: bool, bit_r: bool) -> RelPos {
    match (bit_l, bit_r) {
        (false, false) => RelPos::YBelowX,
        (true, false) => RelPos::XLeftOfY,
        (false, true) => RelPos::YLeftOfX,
        (true, true) => RelPos::XBelowY,
    }
}

/// Left-to-right and right-to-left preorders.
pub fn dfs_orders(tree: &RootedTree) -> (Permutation, Permutation) {
    let left = Permutation::new(tree.preorder().to_vec()).expect("preorder is a permutation");
    let right = Permutation::new(tree.mirrored().preorder().to_vec()).expect("preorder is a permutation");
    (left, right)
}

/// The "y strictly below x" permutation: `x` precedes `y` exactly when the
/// first coloured edge on `[y, x]` is RED.
///
/// `process(v)` first processes the RED-reachable boundary `R(v)`, then emits
/// the uncoloured component `C(v)` by increasing depth (ties by preorder),
/// then processes the GREEN boundary `G(v)`.
pub fn algo1_perm(tree: &RootedTree, colors: &EdgeColoring) -> Permutation {
    enum Task {
        Process(usize),
        Emit(Vec<usize>),
    }
    let mut out = Vec::with_capacity(tree.len());
    let mut tasks = vec![Task::Process(tree.root())];
    while let Some(task) = tasks.pop() {
        match task {
            Task::Emit(list) => out.extend(list),
            Task::Process(v) => {
                let (mut c, mut r, mut g) = (Vec::new(), Vec::new(), Vec::new());
                let mut i = 0;
                c.push(v);
                while i < c.len() {
                    let u = c[i];
                    i += 1;
                    for &w in tree.children(u) {
                        match colors.get(w) {
                            EdgeColor::Uncolored => c.push(w),
                            EdgeColor::Red => r.push(w),
                            EdgeColor::Green => g.push(w),
                        }
                    }
                }
                c.sort_by_key(|&u| (tree.depth(u), tree.pre_rank(u)));
                r.sort_by_key(|&u| tree.pre_rank(u));
                g.sort_by_key(|&u| tree.pre_rank(u));
                for &w in g.iter().rev() {
                    tasks.push(Task::Process(w));
                }
                tasks.push(Task::Emit(c));
                for &w in r.iter().rev() {
                    tasks.push(Task::Process(w));
                }
            }
        }
    }
    Permutation::new(out).expect("every node is emitted once")
}

enum Entry {
    Marker(usize),
    Pending(usize),
}

/// The "x left of y" permutation: `y` precedes `x` exactly when the first
/// coloured edge on `[x ∧ y, x]` is RED.
///
/// RED children are postponed on a global stack; a GREEN child gets a local
/// stack, delimited by a marker, that is drained right after it.
pub fn algo2_perm(tree: &RootedTree, colors: &EdgeColoring) -> Permutation {
    fn process(v: usize, tree: &RootedTree, colors: &EdgeColoring, stack: &mut Vec<Entry>, out: &mut Vec<usize>) {
        out.push(v);
        for &w in tree.children(v) {
            match colors.get(w) {
                EdgeColor::Uncolored => process(w, tree, colors, stack, out),
                EdgeColor::Red => stack.push(Entry::Pending(w)),
                EdgeColor::Green => {
                    stack.push(Entry::Marker(v));
                    process(w, tree, colors, stack, out);
                    loop {
                        match stack.pop() {
                            Some(Entry::Pending(u)) => process(u, tree, colors, stack, out),
                            Some(Entry::Marker(m)) => {
                                debug_assert_eq!(m, v, "markers are removed in nesting order");
                                break;
                            }
                            None => unreachable!("marker pushed above"),
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::with_capacity(tree.len());
    let mut stack = Vec::new();
    process(tree.root(), tree, colors, &mut stack, &mut out);
    while let Some(entry) = stack.pop() {
        match entry {
            Entry::Pending(u) => process(u, tree, colors, &mut stack, &mut out),
            Entry::Marker(_) => unreachable!("markers never survive their local stack"),
        }
    }
    Permutation::new(out).expect("every node is processed once")
}

/// Builds colour-detection permutations for many colourings of one tree,
/// sharing the two preorders and the mirrored tree.
pub struct ColorDetector<'t> {
    tree: &'t RootedTree,
    mirrored: RootedTree,
}

impl<'t> ColorDetector<'t> {
    pub fn new(tree: &'t RootedTree) -> Self {
        ColorDetector {
            tree,
            mirrored: tree.mirrored(),
        }
    }

    pub fn dfs_orders(&self) -> (Permutation, Permutation) {
        let left = Permutation::new(self.tree.preorder().to_vec()).expect("preorder");
        let right = Permutation::new(self.mirrored.preorder().to_vec()).expect("preorder");
        (left, right)
    }

    /// The three colouring-specific permutations: the red-first order, the
    /// green-guarded order, and the green-guarded order on the mirrored tree.
    pub fn fresh(&self, colors: &EdgeColoring) -> [Permutation; 3] {
        [
            algo1_perm(self.tree, colors),
            algo2_perm(self.tree, colors),
            algo2_perm(&self.mirrored, colors),
        ]
    }
}

/// All five permutations, `[pi_L, pi_R, alg1, alg2, mirrored alg2]`, and the
/// one-node program for `side` reading them as bits `0..5`.
pub fn color_detect_build(tree: &RootedTree, colors: &EdgeColoring, side: Side) -> ([Permutation; 5], BranchingProgram) {
    let det = ColorDetector::new(tree);
    let (l, r) = det.dfs_orders();
    let [a1, a2, a2m] = det.fresh(colors);
    let mut b = ProgramBuilder::new();
    let root = b.color_detect([0, 1, 2, 3, 4], side);
    let program = b.finish(5, root).expect("bits 0..5 exist");
    ([l, r, a1, a2, a2m], program)
}

/// Decides the tool's question from the five bits. For `Side::Y` the roles of
/// `x` and `y` are exchanged, which negates every bit.
///
/// Outputs false when the path has no coloured edge, and when the pair does
/// not satisfy the premise (the chosen endpoint is below the other one).
pub fn color_detect_eval(bits: [bool; 5], side: Side) -> bool {
    let b = match side {
        Side::X => bits,
        Side::Y => bits.map(|b| !b),
    };
    match rel_pos(b[0], b[1]) {
        RelPos::YBelowX => b[2],
        RelPos::XLeftOfY => !b[3],
        RelPos::YLeftOfX => !b[4],
        RelPos::XBelowY => false,
    }
}

//! Branching programs over order bits.
//!
//! A program is a DAG of nodes stored in an arena, children before parents.
//! Its only input is an [`OrderBits`] vector, so two query pairs with equal
//! bits always get equal answers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::color_detect::color_detect_eval;
use super::membership::set_membership_decode;
use super::perm::Permutation;
use crate::error::{Error, Result};

pub type NodeId = u32;

/// Which endpoint of the query pair a tool reports on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
}

/// Bit `i` is true when `x` is not after `y` in permutation `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderBits(pub Vec<bool>);

impl OrderBits {
    pub fn of_pair(perms: &[Permutation], x: usize, y: usize) -> OrderBits {
        OrderBits(perms.iter().map(|p| p.before(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The bits of the swapped pair `(y, x)`, valid when `x != y`.
    pub fn swapped(&self) -> OrderBits {
        OrderBits(self.0.iter().map(|b| !b).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Const { value: bool },
    Bit { bit: u32 },
    Not { child: NodeId },
    /// True when every child is; evaluated left to right, stopping early.
    All { children: Vec<NodeId> },
    /// True when some child is; evaluated left to right, stopping early.
    Any { children: Vec<NodeId> },
    Ite { cond: NodeId, then: NodeId, other: NodeId },
    /// Evaluates the child on the pair `(y, x)`; all bits are negated.
    Swap { child: NodeId },
    /// Set membership decoder over three permutations.
    Membership { bits: [u32; 3], side: Side },
    /// Colour detection over `[pi_L, pi_R, alg1, alg2, mirrored alg2]`.
    ColorDetect { bits: [u32; 5], side: Side },
}

impl Node {
    pub fn children(&self) -> Vec<NodeId> {
        match self {
            Node::Not { child } | Node::Swap { child } => vec![*child],
            Node::All { children } | Node::Any { children } => children.clone(),
            Node::Ite { cond, then, other } => vec![*cond, *then, *other],
            _ => Vec::new(),
        }
    }

    pub fn read_bits(&self) -> Vec<u32> {
        match self {
            Node::Bit { bit } => vec![*bit],
            Node::Membership { bits, .. } => bits.to_vec(),
            Node::ColorDetect { bits, .. } => bits.to_vec(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchingProgram {
    num_bits: usize,
    nodes: Vec<Node>,
    root: NodeId,
}

impl BranchingProgram {
    /// Checks that every child id is smaller than its parent's id and that
    /// every read bit exists.
    pub fn new(num_bits: usize, nodes: Vec<Node>, root: NodeId) -> Result<BranchingProgram> {
        let program = BranchingProgram {
            num_bits,
            nodes,
            root,
        };
        program.check()?;
        Ok(program)
    }

    pub fn check(&self) -> Result<()> {
        if self.root as usize >= self.nodes.len() {
            return Err(Error::BadChild {
                node: self.nodes.len(),
                child: self.root as usize,
            });
        }
        for (id, node) in self.nodes.iter().enumerate() {
            for c in node.children() {
                if c as usize >= id {
                    return Err(Error::BadChild {
                        node: id,
                        child: c as usize,
                    });
                }
            }
            for b in node.read_bits() {
                if b as usize >= self.num_bits {
                    return Err(Error::BitOutOfRange {
                        bit: b as usize,
                        width: self.num_bits,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn evaluate(&self, bits: &OrderBits) -> Result<bool> {
        Evaluator::new(self).eval(bits)
    }

    /// Same program rooted elsewhere; used to test subprograms in isolation.
    pub fn with_root(&self, root: NodeId) -> BranchingProgram {
        BranchingProgram {
            num_bits: self.num_bits,
            nodes: self.nodes.clone(),
            root,
        }
    }
}

/// Reusable evaluation scratch space; results are memoised per node and
/// swap parity within one evaluation.
pub struct Evaluator<'p> {
    program: &'p BranchingProgram,
    stamp: Vec<u32>,
    value: Vec<bool>,
    epoch: u32,
}

impl<'p> Evaluator<'p> {
    pub fn new(program: &'p BranchingProgram) -> Self {
        let slots = 2 * program.nodes.len();
        Evaluator {
            program,
            stamp: vec![0; slots],
            value: vec![false; slots],
            epoch: 0,
        }
    }

    pub fn eval(&mut self, bits: &OrderBits) -> Result<bool> {
        self.eval_at(self.program.root, bits)
    }

    pub fn eval_at(&mut self, node: NodeId, bits: &OrderBits) -> Result<bool> {
        if bits.len() != self.program.num_bits {
            return Err(Error::BitLengthMismatch {
                expected: self.program.num_bits,
                actual: bits.len(),
            });
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.visit(node, false, &bits.0)
    }

    fn visit(&mut self, id: NodeId, flip: bool, bits: &[bool]) -> Result<bool> {
        let slot = 2 * id as usize + usize::from(flip);
        if self.stamp[slot] == self.epoch {
            return Ok(self.value[slot]);
        }
        let program = self.program;
        let read = |b: u32| bits[b as usize] ^ flip;
        let v = match &program.nodes[id as usize] {
            Node::Const { value } => *value,
            Node::Bit { bit } => read(*bit),
            Node::Not { child } => !self.visit(*child, flip, bits)?,
            Node::All { children } => {
                let mut all = true;
                for &c in children {
                    if !self.visit(c, flip, bits)? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Node::Any { children } => {
                let mut any = false;
                for &c in children {
                    if self.visit(c, flip, bits)? {
                        any = true;
                        break;
                    }
                }
                any
            }
            Node::Ite { cond, then, other } => {
                if self.visit(*cond, flip, bits)? {
                    self.visit(*then, flip, bits)?
                } else {
                    self.visit(*other, flip, bits)?
                }
            }
            Node::Swap { child } => self.visit(*child, !flip, bits)?,
            Node::Membership { bits: b, side } => {
                let (x_in, y_in) = set_membership_decode([read(b[0]), read(b[1]), read(b[2])])?;
                match side {
                    Side::X => x_in,
                    Side::Y => y_in,
                }
            }
            Node::ColorDetect { bits: b, side } => {
                color_detect_eval([read(b[0]), read(b[1]), read(b[2]), read(b[3]), read(b[4])], *side)
            }
        };
        self.stamp[slot] = self.epoch;
        self.value[slot] = v;
        Ok(v)
    }
}

/// Hash-consing builder with light constant folding.
#[derive(Default)]
pub struct ProgramBuilder {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    fn as_const(&self, id: NodeId) -> Option<bool> {
        match self.nodes[id as usize] {
            Node::Const { value } => Some(value),
            _ => None,
        }
    }

    pub fn constant(&mut self, value: bool) -> NodeId {
        self.intern(Node::Const { value })
    }

    pub fn bit(&mut self, bit: usize) -> NodeId {
        self.intern(Node::Bit { bit: bit as u32 })
    }

    pub fn not(&mut self, child: NodeId) -> NodeId {
        match self.nodes[child as usize] {
            Node::Const { value } => self.constant(!value),
            Node::Not { child: inner } => inner,
            _ => self.intern(Node::Not { child }),
        }
    }

    pub fn all(&mut self, children: impl IntoIterator<Item = NodeId>) -> NodeId {
        let mut kept = Vec::new();
        for c in children {
            match self.as_const(c) {
                Some(true) => {}
                Some(false) => return self.constant(false),
                None => kept.push(c),
            }
        }
        match kept.len() {
            0 => self.constant(true),
            1 => kept[0],
            _ => self.intern(Node::All { children: kept }),
        }
    }

    pub fn any(&mut self, children: impl IntoIterator<Item = NodeId>) -> NodeId {
        let mut kept = Vec::new();
        for c in children {
            match self.as_const(c) {
                Some(false) => {}
                Some(true) => return self.constant(true),
                None => kept.push(c),
            }
        }
        match kept.len() {
            0 => self.constant(false),
            1 => kept[0],
            _ => self.intern(Node::Any { children: kept }),
        }
    }

    pub fn ite(&mut self, cond: NodeId, then: NodeId, other: NodeId) -> NodeId {
        if then == other {
            return then;
        }
        match self.as_const(cond) {
            Some(true) => then,
            Some(false) => other,
            None => match (self.as_const(then), self.as_const(other)) {
                (Some(true), Some(false)) => cond,
                (Some(false), Some(true)) => self.not(cond),
                (Some(false), None) => {
                    let nc = self.not(cond);
                    self.all([nc, other])
                }
                (None, Some(false)) => self.all([cond, then]),
                _ => self.intern(Node::Ite { cond, then, other }),
            },
        }
    }

    pub fn swap(&mut self, child: NodeId) -> NodeId {
        match self.nodes[child as usize] {
            Node::Const { .. } => child,
            Node::Swap { child: inner } => inner,
            _ => self.intern(Node::Swap { child }),
        }
    }

    pub fn membership(&mut self, bits: [usize; 3], side: Side) -> NodeId {
        self.intern(Node::Membership {
            bits: bits.map(|b| b as u32),
            side,
        })
    }

    pub fn color_detect(&mut self, bits: [usize; 5], side: Side) -> NodeId {
        self.intern(Node::ColorDetect {
            bits: bits.map(|b| b as u32),
            side,
        })
    }

    pub fn finish(self, num_bits: usize, root: NodeId) -> Result<BranchingProgram> {
        BranchingProgram::new(num_bits, self.nodes, root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_connectives() {
        let mut b = ProgramBuilder::new();
        let x0 = b.bit(0);
        let x1 = b.bit(1);
        let n1 = b.not(x1);
        let and = b.all([x0, n1]);
        let root = b.any([and, x1]);
        let p = b.finish(2, root).unwrap();
        for (bits, want) in [([false, false], false), ([true, false], true), ([false, true], true)] {
            assert_eq!(p.evaluate(&OrderBits(bits.to_vec())).unwrap(), want);
        }
        assert!(matches!(
            p.evaluate(&OrderBits(vec![true])),
            Err(Error::BitLengthMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn swap_negates_bits() {
        let mut b = ProgramBuilder::new();
        let x0 = b.bit(0);
        let s = b.swap(x0);
        let p = b.finish(1, s).unwrap();
        assert!(!p.evaluate(&OrderBits(vec![true])).unwrap());
    }

    #[test]
    fn folding_and_sharing() {
        let mut b = ProgramBuilder::new();
        let x = b.bit(0);
        let f = b.constant(false);
        assert_eq!(b.all([x, f]), f);
        assert_eq!(b.bit(0), x);
        let t = b.constant(true);
        assert_eq!(b.ite(x, t, f), x);
    }

    #[test]
    fn rejects_forward_children_and_wide_bits() {
        let nodes = vec![Node::Not { child: 0 }];
        assert!(matches!(
            BranchingProgram::new(1, nodes, 0),
            Err(Error::BadChild { node: 0, child: 0 })
        ));
        let nodes = vec![Node::Bit { bit: 3 }];
        assert!(matches!(
            BranchingProgram::new(2, nodes, 0),
            Err(Error::BitOutOfRange { bit: 3, width: 2 })
        ));
    }
}

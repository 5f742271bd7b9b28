//! Rooted trees with a fixed left-to-right order of children.

/// A rooted, ordered tree on nodes `0..len`.
///
/// "Below" follows the upward drawing convention: the root is the lowest
/// node, so `a` is below `b` when `a` is an ancestor of `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    pre: Vec<usize>,
    last_pre: Vec<usize>,
    preorder: Vec<usize>,
}

impl RootedTree {
    /// Builds a tree from ordered child lists. Panics if the lists do not
    /// describe a tree spanning `0..children.len()` rooted at `root`.
    pub fn from_children(root: usize, children: Vec<Vec<usize>>) -> RootedTree {
        let n = children.len();
        assert!(root < n, "root out of range");
        let mut parent = vec![None; n];
        for (v, cs) in children.iter().enumerate() {
            for &c in cs {
                assert!(parent[c].is_none() && c != root, "node {c} has two parents");
                parent[c] = Some(v);
            }
        }
        let mut depth = vec![0; n];
        let mut pre = vec![usize::MAX; n];
        let mut last_pre = vec![0; n];
        let mut preorder = Vec::with_capacity(n);
        // Iterative preorder; the second stack entry closes a subtree.
        let mut stack = vec![(root, false)];
        while let Some((v, closing)) = stack.pop() {
            if closing {
                last_pre[v] = preorder.len() - 1;
                continue;
            }
            pre[v] = preorder.len();
            preorder.push(v);
            stack.push((v, true));
            for &c in children[v].iter().rev() {
                depth[c] = depth[v] + 1;
                stack.push((c, false));
            }
        }
        assert_eq!(preorder.len(), n, "children lists do not span a tree");
        RootedTree {
            root,
            parent,
            children,
            depth,
            pre,
            last_pre,
            preorder,
        }
    }

    /// Builds a tree from a parent array; children keep increasing id order.
    pub fn from_parents(parent: &[Option<usize>]) -> RootedTree {
        let mut children = vec![Vec::new(); parent.len()];
        let mut root = None;
        for (v, p) in parent.iter().enumerate() {
            match p {
                Some(p) => children[*p].push(v),
                None => {
                    assert!(root.is_none(), "more than one root");
                    root = Some(v);
                }
            }
        }
        RootedTree::from_children(root.expect("no root"), children)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Rank of `v` in the left-to-right preorder.
    pub fn pre_rank(&self, v: usize) -> usize {
        self.pre[v]
    }

    /// Nodes in left-to-right preorder (a topological order from the root).
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// `a` is an ancestor of `b` or equal to it.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.pre[a] <= self.pre[b] && self.pre[b] <= self.last_pre[a]
    }

    /// Nodes of the subtree rooted at `v`, in preorder.
    pub fn subtree(&self, v: usize) -> &[usize] {
        &self.preorder[self.pre[v]..=self.last_pre[v]]
    }

    pub fn meet(&self, mut u: usize, mut v: usize) -> usize {
        while !self.is_ancestor(u, v) {
            u = self.parent[u].expect("root is an ancestor of everything");
        }
        while u != v && !self.is_ancestor(v, u) {
            v = self.parent[v].expect("root is an ancestor of everything");
        }
        if self.depth[u] <= self.depth[v] {
            u
        } else {
            v
        }
    }

    /// The path from ancestor `a` up to descendant `b`, both included.
    pub fn path_from_ancestor(&self, a: usize, b: usize) -> Vec<usize> {
        assert!(self.is_ancestor(a, b), "{a} is not below {b}");
        let mut path = vec![b];
        let mut v = b;
        while v != a {
            v = self.parent[v].expect("a is an ancestor");
            path.push(v);
        }
        path.reverse();
        path
    }

    /// The same tree with every child list reversed.
    pub fn mirrored(&self) -> RootedTree {
        let children = self
            .children
            .iter()
            .map(|cs| cs.iter().rev().copied().collect())
            .collect();
        RootedTree::from_children(self.root, children)
    }
}

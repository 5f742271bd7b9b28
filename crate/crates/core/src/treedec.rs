//! Tree decompositions: PACE `.td` I/O, validation, a min-fill heuristic,
//! and the rooted normal form used by the realizer construction.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{parse_id, parse_num, syntax, Graph};
use crate::poset::Poset;
use crate::tree::RootedTree;

/// Bags on tree nodes `0..bags.len()`, each a sorted list of graph vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    num_vertices: usize,
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(num_vertices: usize, bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|b| b.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
            .collect();
        let edges = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        TreeDecomposition {
            num_vertices,
            bags,
            edges,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn bag(&self, node: usize) -> &[usize] {
        &self.bags[node]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest bag size minus one (0 for decompositions with only empty bags).
    pub fn width(&self) -> usize {
        self.max_bag_size().saturating_sub(1)
    }

    /// Parses PACE 2017 `.td`: `s td <bags> <width+1> <n>`, `b <i> <v...>`, then `<i> <j>` tree edges.
    pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
        let mut bag_lines = 0;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            match fields[0] {
                "s" => {
                    if header.is_some() {
                        return Err(syntax(line, "duplicate header"));
                    }
                    if fields.len() != 5 || fields[1] != "td" {
                        return Err(syntax(line, "expected `s td <bags> <width+1> <n>`"));
                    }
                    let nb = parse_num(fields[2], line)?;
                    header = Some((nb, parse_num(fields[3], line)?, parse_num(fields[4], line)?));
                    bags = vec![None; nb];
                }
                "b" => {
                    let (nb, _, n) = header.ok_or_else(|| syntax(line, "bag before header"))?;
                    if fields.len() < 2 {
                        return Err(syntax(line, "expected `b <i> <v...>`"));
                    }
                    bag_lines += 1;
                    let id = parse_num(fields[1], line)?;
                    if id == 0 || id > nb {
                        return Err(Error::InconsistentHeader(format!(
                            "bag id {id} on line {line} exceeds declared bag count {nb}"
                        )));
                    }
                    if bags[id - 1].is_some() {
                        return Err(syntax(line, format!("bag {id} defined twice")));
                    }
                    let verts = fields[2..]
                        .iter()
                        .map(|f| parse_id(f, n, line))
                        .collect::<Result<Vec<_>>>()?;
                    bags[id - 1] = Some(verts);
                }
                _ => {
                    let (nb, _, _) = header.ok_or_else(|| syntax(line, "edge before header"))?;
                    if fields.len() != 2 {
                        return Err(syntax(line, "expected `<i> <j>`"));
                    }
                    let a = parse_id(fields[0], nb, line)?;
                    let b = parse_id(fields[1], nb, line)?;
                    edges.push((a, b));
                }
            }
        }
        let (nb, declared_size, n) = header.ok_or_else(|| syntax(0, "missing `s td` header"))?;
        if bag_lines != nb {
            return Err(Error::InconsistentHeader(format!(
                "header declares {nb} bags, found {bag_lines} bag lines"
            )));
        }
        let bags: Vec<Vec<usize>> = bags.into_iter().map(|b| b.unwrap_or_default()).collect();
        let td = TreeDecomposition::new(n, bags, edges);
        if td.max_bag_size() != declared_size {
            return Err(Error::InconsistentHeader(format!(
                "header declares bag size {declared_size}, largest bag has {}",
                td.max_bag_size()
            )));
        }
        Ok(td)
    }

    pub fn to_td(&self) -> String {
        let mut out = format!(
            "s td {} {} {}\n",
            self.bags.len(),
            self.max_bag_size(),
            self.num_vertices
        );
        for (i, bag) in self.bags.iter().enumerate() {
            let _ = write!(out, "b {}", i + 1);
            for v in bag {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }
}

/// Violations of the three decomposition properties, plus tree-shape defects.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Property (1): vertices in no bag.
    pub uncovered_vertices: Vec<usize>,
    /// Property (2): edges with no bag containing both ends.
    pub uncovered_edges: Vec<(usize, usize)>,
    /// Property (3): vertices whose bags do not form a connected subtree.
    pub disconnected_vertices: Vec<usize>,
    /// The node/edge structure is not a tree, or bags mention unknown vertices.
    pub tree_defects: Vec<String>,
    pub width: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.uncovered_vertices.is_empty()
            && self.uncovered_edges.is_empty()
            && self.disconnected_vertices.is_empty()
            && self.tree_defects.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid, width {}", self.width);
        }
        let one_based = |vs: &[usize]| vs.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ");
        let mut parts = Vec::new();
        if !self.uncovered_vertices.is_empty() {
            parts.push(format!("property 1 (vertex coverage) fails for: {}", one_based(&self.uncovered_vertices)));
        }
        if !self.uncovered_edges.is_empty() {
            let es: Vec<String> = self.uncovered_edges.iter().map(|(u, v)| format!("{}-{}", u + 1, v + 1)).collect();
            parts.push(format!("property 2 (edge coverage) fails for: {}", es.join(" ")));
        }
        if !self.disconnected_vertices.is_empty() {
            parts.push(format!("property 3 (connectivity) fails for: {}", one_based(&self.disconnected_vertices)));
        }
        parts.extend(self.tree_defects.iter().cloned());
        write!(f, "{}", parts.join("; "))
    }
}

pub fn validate(graph: &Graph, td: &TreeDecomposition) -> ValidationReport {
    let mut report = ValidationReport {
        width: td.width(),
        ..Default::default()
    };
    let nodes = td.num_nodes();
    let n = graph.num_vertices();

    if nodes == 0 {
        report.tree_defects.push("decomposition has no nodes".into());
    } else {
        let mut adj = vec![Vec::new(); nodes];
        for &(a, b) in td.edges() {
            if a >= nodes || b >= nodes {
                report.tree_defects.push(format!("tree edge {}-{} out of range", a + 1, b + 1));
                continue;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; nodes];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached != nodes {
            report.tree_defects.push("tree is not connected".into());
        }
        if td.edges().len() != nodes - 1 {
            report.tree_defects.push(format!(
                "tree on {nodes} nodes has {} edges",
                td.edges().len()
            ));
        }
    }

    let mut holders = vec![Vec::new(); n];
    for (t, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if v >= n {
                report.tree_defects.push(format!("bag {} mentions unknown vertex {}", t + 1, v + 1));
            } else {
                holders[v].push(t);
            }
        }
    }
    let contains = |t: usize, v: usize| td.bag(t).binary_search(&v).is_ok();

    for (v, hs) in holders.iter().enumerate() {
        if hs.is_empty() {
            report.uncovered_vertices.push(v);
        }
    }
    for (u, v) in graph.edges() {
        if !holders[u].iter().any(|&t| contains(t, v)) {
            report.uncovered_edges.push((u, v));
        }
    }
    // Nodes holding v span a connected subforest iff they carry |holders|-1 tree edges.
    let mut inner_edges = vec![0usize; n];
    for &(a, b) in td.edges() {
        if a >= nodes || b >= nodes {
            continue;
        }
        for &v in td.bag(a) {
            if v < n && contains(b, v) {
                inner_edges[v] += 1;
            }
        }
    }
    for (v, hs) in holders.iter().enumerate() {
        if !hs.is_empty() && inner_edges[v] != hs.len() - 1 {
            report.disconnected_vertices.push(v);
        }
    }
    report
}

/// Min-fill elimination; ties go to the smaller degree, then the smaller vertex id.
pub fn heuristic_decompose(graph: &Graph) -> TreeDecomposition {
    let n = graph.num_vertices();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| graph.neighbors(v).collect()).collect();
    let mut alive = vec![true; n];
    let mut bag_of = vec![usize::MAX; n];
    let mut bags = Vec::with_capacity(n);
    let mut later_neighbors = Vec::with_capacity(n);

    let fill_in = |adj: &[BTreeSet<usize>], v: usize| {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !adj[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    };

    for step in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill_in(&adj, v), adj[v].len(), v))
            .expect("a live vertex remains");
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nb {
            adj[a].remove(&v);
        }
        adj[v].clear();
        alive[v] = false;
        bag_of[v] = step;
        let mut bag = nb.clone();
        bag.push(v);
        bags.push(bag);
        later_neighbors.push(nb);
    }

    // Each bag hangs off the bag of its earliest-eliminated later neighbour;
    // component roots are then chained to the final bag.
    let mut edges = Vec::new();
    for (step, nb) in later_neighbors.iter().enumerate() {
        match nb.iter().map(|&u| bag_of[u]).min() {
            Some(parent) => edges.push((step, parent)),
            None if step + 1 < n => edges.push((step, n - 1)),
            None => {}
        }
    }
    if n == 0 {
        return TreeDecomposition::new(0, vec![vec![]], vec![]);
    }
    TreeDecomposition::new(n, bags, edges)
}

/// A decomposition rooted at node 0 with left-to-right preorder node ids and
/// pairwise distinct element roots.
#[derive(Clone, Debug)]
pub struct NormalizedDecomposition {
    td: TreeDecomposition,
    tree: RootedTree,
    root_of: Vec<usize>,
    rooted_here: Vec<Option<usize>>,
}

impl NormalizedDecomposition {
    pub fn decomposition(&self) -> &TreeDecomposition {
        &self.td
    }

    pub fn tree(&self) -> &RootedTree {
        &self.tree
    }

    pub fn bag(&self, node: usize) -> &[usize] {
        self.td.bag(node)
    }

    /// The lowest node whose bag contains `elem`.
    pub fn root_of(&self, elem: usize) -> usize {
        self.root_of[elem]
    }

    pub fn roots(&self) -> &[usize] {
        &self.root_of
    }

    /// The element whose root is `node`, if any.
    pub fn element_rooted_at(&self, node: usize) -> Option<usize> {
        self.rooted_here[node]
    }

    pub fn width(&self) -> usize {
        self.td.width()
    }

    pub fn num_elements(&self) -> usize {
        self.root_of.len()
    }
}

/// Roots `td`, splits nodes that are the lowest node of several elements
/// into chains, and fixes a deterministic child order.
///
/// A node `t` that is the lowest node of `z_1 < ... < z_s` (by id) becomes the
/// chain `t_1 .. t_s` with `bag(t_j) = B_t \ {z_i : i > j}`; the parent hangs on
/// `t_1` and the old children on `t_s`. Children are ordered by the smallest
/// element in their subtree, ties by node id.
pub fn normalize(poset: &Poset, td: &TreeDecomposition) -> Result<NormalizedDecomposition> {
    let report = validate(&poset.cover_graph(), td);
    if !report.is_valid() {
        return Err(Error::InvalidDecomposition(Box::new(report)));
    }
    let nodes = td.num_nodes();
    let n = poset.len();

    let mut adj = vec![Vec::new(); nodes];
    for &(a, b) in td.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![None; nodes];
    let mut depth = vec![0usize; nodes];
    let mut bfs = vec![0];
    let mut seen = vec![false; nodes];
    seen[0] = true;
    let mut i = 0;
    while i < bfs.len() {
        let v = bfs[i];
        i += 1;
        let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !seen[w]).collect();
        next.sort_unstable();
        for w in next {
            seen[w] = true;
            parent[w] = Some(v);
            depth[w] = depth[v] + 1;
            bfs.push(w);
        }
    }

    let mut lowest = vec![usize::MAX; n];
    for (t, bag) in td.bags().iter().enumerate() {
        for &z in bag {
            if lowest[z] == usize::MAX || depth[t] < depth[lowest[z]] {
                lowest[z] = t;
            }
        }
    }
    let mut rooted: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (z, &t) in lowest.iter().enumerate() {
        rooted[t].push(z);
    }

    // Expand every node into its chain; `first`/`last` give the chain ends.
    let mut new_bags: Vec<Vec<usize>> = Vec::new();
    let mut new_parent: Vec<Option<usize>> = Vec::new();
    let mut first = vec![0; nodes];
    let mut last = vec![0; nodes];
    for t in 0..nodes {
        let zs = &rooted[t];
        let len = zs.len().max(1);
        first[t] = new_bags.len();
        for j in 0..len {
            let dropped: &[usize] = if zs.len() > 1 { &zs[j + 1..] } else { &[] };
            let bag: Vec<usize> = td.bag(t).iter().copied().filter(|z| !dropped.contains(z)).collect();
            new_parent.push(if j == 0 { None } else { Some(new_bags.len() - 1) });
            new_bags.push(bag);
        }
        last[t] = new_bags.len() - 1;
    }
    for t in 0..nodes {
        if let Some(p) = parent[t] {
            new_parent[first[t]] = Some(last[p]);
        }
    }

    let m = new_bags.len();
    let mut children = vec![Vec::new(); m];
    for (v, p) in new_parent.iter().enumerate() {
        if let Some(p) = p {
            children[*p].push(v);
        }
    }
    let root = first[0];
    // Smallest element in each subtree, computed bottom-up along a BFS order.
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        order.extend(children[v].iter().copied());
    }
    let mut min_elem: Vec<usize> = new_bags.iter().map(|b| b.first().copied().unwrap_or(usize::MAX)).collect();
    for &v in order.iter().rev() {
        if let Some(p) = new_parent[v] {
            min_elem[p] = min_elem[p].min(min_elem[v]);
        }
    }
    for cs in &mut children {
        cs.sort_by_key(|&c| (min_elem[c], c));
    }

    // Relabel along the left-to-right preorder.
    let provisional = RootedTree::from_children(root, children);
    let relabel: Vec<usize> = {
        let mut r = vec![0; m];
        for (rank, &v) in provisional.preorder().iter().enumerate() {
            r[v] = rank;
        }
        r
    };
    let mut bags = vec![Vec::new(); m];
    let mut final_children = vec![Vec::new(); m];
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    for v in 0..m {
        bags[relabel[v]] = new_bags[v].clone();
        final_children[relabel[v]] = provisional.children(v).iter().map(|&c| relabel[c]).collect();
        for &c in provisional.children(v) {
            edges.push((relabel[v], relabel[c]));
        }
    }
    edges.sort_unstable();
    let tree = RootedTree::from_children(0, final_children);
    let td = TreeDecomposition::new(n, bags, edges);

    let mut root_of = vec![usize::MAX; n];
    for &t in tree.preorder() {
        for &z in td.bag(t) {
            if root_of[z] == usize::MAX {
                root_of[z] = t;
            }
        }
    }
    let mut rooted_here = vec![None; m];
    for (z, &t) in root_of.iter().enumerate() {
        debug_assert!(rooted_here[t].is_none(), "roots must be distinct after splitting");
        rooted_here[t] = Some(z);
    }
    Ok(NormalizedDecomposition {
        td,
        tree,
        root_of,
        rooted_here,
    })
}

//! Test-corpus generators: standard examples, Kelly's planar posets,
//! random posets of bounded tree-width, chains, antichains and forests.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::treedec::TreeDecomposition;

#[derive(Clone, Debug)]
pub struct GeneratorOutput {
    pub poset: Poset,
    /// A decomposition of the cover graph known from the construction.
    pub decomposition: Option<TreeDecomposition>,
    /// Distinguished elements by name, e.g. `a3` -> id.
    pub witness: Option<BTreeMap<String, usize>>,
}

fn ab_witness(n: usize, a: impl Fn(usize) -> usize, b: impl Fn(usize) -> usize) -> BTreeMap<String, usize> {
    let mut w = BTreeMap::new();
    for i in 1..=n {
        w.insert(format!("a{i}"), a(i));
        w.insert(format!("b{i}"), b(i));
    }
    w
}

/// The standard example `S_n`: `a_i < b_j` exactly when `i != j`.
///
/// `a_i` has id `i-1` and `b_i` has id `n+i-1`. The supplied decomposition is
/// a star: a central bag with all `a_i`, and one leaf bag adding each `b_j`.
pub fn standard_example(n: usize) -> Result<GeneratorOutput> {
    if n < 2 {
        return Err(Error::NTooSmall { n, min: 2 });
    }
    let mut rel = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rel.push((i, n + j));
            }
        }
    }
    let poset = Poset::new(2 * n, &rel)?;
    let all_a: Vec<usize> = (0..n).collect();
    let mut bags = vec![all_a.clone()];
    let mut edges = Vec::new();
    for j in 0..n {
        let mut bag = all_a.clone();
        bag.push(n + j);
        bags.push(bag);
        edges.push((0, j + 1));
    }
    Ok(GeneratorOutput {
        poset,
        decomposition: Some(TreeDecomposition::new(2 * n, bags, edges)),
        witness: Some(ab_witness(n, |i| i - 1, |i| n + i - 1)),
    })
}

/// Kelly's construction: a planar poset of path-width 3 containing `S_n`.
///
/// Besides `a_1..a_n` (ids `0..n`) and `b_1..b_n` (ids `n..2n`) there are two
/// chains `u_1 < ... < u_{n-1}` and `w_{n-1} < ... < w_1`. The relations are
/// `a_i < u_i`, `u_{j-1} < b_j`, `a_i < w_{i-1}` and `w_j < b_j`, so `a_i`
/// reaches `b_j` through the `u` chain when `i < j` and through the `w` chain
/// when `i > j`.
pub fn kelly(n: usize) -> Result<GeneratorOutput> {
    if n < 3 {
        return Err(Error::NTooSmall { n, min: 3 });
    }
    let a = |i: usize| i - 1;
    let b = |i: usize| n + i - 1;
    let u = |i: usize| 2 * n + i - 1;
    let w = |i: usize| 3 * n - 1 + i - 1;
    let total = 4 * n - 2;

    let mut rel = Vec::new();
    for i in 1..n {
        rel.push((a(i), u(i)));
        rel.push((u(i), b(i + 1)));
        rel.push((a(i + 1), w(i)));
        rel.push((w(i), b(i)));
        if i + 1 < n {
            rel.push((u(i), u(i + 1)));
            rel.push((w(i + 1), w(i)));
        }
    }
    let poset = Poset::new(total, &rel)?;

    // Spine X_i = {u_{i-1}, w_{i-1}, u_i, w_i} for i = 2..n-1, one pendant
    // bag per a_i and b_i hung on the spine bag that holds its neighbours.
    let mut bags: Vec<Vec<usize>> = (2..n).map(|i| vec![u(i - 1), w(i - 1), u(i), w(i)]).collect();
    let spine = |i: usize| i - 2;
    let mut edges: Vec<(usize, usize)> = (2..n - 1).map(|i| (spine(i), spine(i + 1))).collect();
    let mut hang = |bag: Vec<usize>, at: usize, bags: &mut Vec<Vec<usize>>| {
        bags.push(bag);
        edges.push((at, bags.len() - 1));
    };
    hang(vec![a(1), u(1)], spine(2), &mut bags);
    hang(vec![b(1), w(1)], spine(2), &mut bags);
    for i in 2..n {
        hang(vec![a(i), u(i), w(i - 1)], spine(i), &mut bags);
        hang(vec![b(i), u(i - 1), w(i)], spine(i), &mut bags);
    }
    hang(vec![a(n), w(n - 1)], spine(n - 1), &mut bags);
    hang(vec![b(n), u(n - 1)], spine(n - 1), &mut bags);

    Ok(GeneratorOutput {
        poset,
        decomposition: Some(TreeDecomposition::new(total, bags, edges)),
        witness: Some(ab_witness(n, a, b)),
    })
}

/// Probability that a pair sharing a bag becomes a relation.
const EDGE_DENSITY: f64 = 0.55;

/// A random poset whose cover graph has tree-width at most `k`.
///
/// The decomposition is sampled first (each new vertex joins a random subset
/// of at most `k` vertices of an existing bag), then pairs sharing a bag are
/// related according to a random linear order. The output is a pure function
/// of `(n, k, seed)`.
pub fn random_bounded_tw(n: usize, k: usize, seed: u64) -> GeneratorOutput {
    let n = n.max(1);
    let k = k.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let first = (k + 1).min(n);
    let mut bags: Vec<Vec<usize>> = vec![order[..first].to_vec()];
    let mut edges = Vec::new();
    for &v in &order[first..] {
        let parent = rng.gen_range(0..bags.len());
        let mut pool = bags[parent].clone();
        pool.shuffle(&mut rng);
        let take = rng.gen_range(1..=k.min(pool.len()));
        let mut bag = pool[..take].to_vec();
        bag.push(v);
        bags.push(bag);
        edges.push((parent, bags.len() - 1));
    }

    let mut pairs = BTreeSet::new();
    for bag in &bags {
        for (i, &x) in bag.iter().enumerate() {
            for &y in &bag[i + 1..] {
                pairs.insert((x.min(y), x.max(y)));
            }
        }
    }
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(&mut rng);
    let rel: Vec<(usize, usize)> = pairs
        .into_iter()
        .filter(|_| rng.gen_bool(EDGE_DENSITY))
        .map(|(x, y)| if rank[x] < rank[y] { (x, y) } else { (y, x) })
        .collect();
    let poset = Poset::new(n, &rel).expect("relations follow a linear order");
    GeneratorOutput {
        poset,
        decomposition: Some(TreeDecomposition::new(n, bags, edges)),
        witness: None,
    }
}

/// A chain with the path decomposition `{0,1}, {1,2}, ...`.
pub fn chain(n: usize) -> GeneratorOutput {
    let n = n.max(1);
    let (bags, edges) = if n == 1 {
        (vec![vec![0]], vec![])
    } else {
        ((1..n).map(|i| vec![i - 1, i]).collect(), (1..n - 1).map(|i| (i - 1, i)).collect())
    };
    GeneratorOutput {
        poset: Poset::chain(n),
        decomposition: Some(TreeDecomposition::new(n, bags, edges)),
        witness: None,
    }
}

/// An antichain decomposed as a path of singleton bags.
pub fn antichain(n: usize) -> GeneratorOutput {
    let n = n.max(1);
    GeneratorOutput {
        poset: Poset::antichain(n),
        decomposition: Some(TreeDecomposition::new(
            n,
            (0..n).map(|v| vec![v]).collect(),
            (1..n).map(|i| (i - 1, i)).collect(),
        )),
        witness: None,
    }
}

/// A random forest order: each element is either a minimal element or lies
/// directly above an earlier element, chosen at random.
pub fn forest(n: usize, seed: u64) -> GeneratorOutput {
    let n = n.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rel = Vec::new();
    let mut bags = vec![vec![0]];
    let mut edges = Vec::new();
    for v in 1..n {
        if rng.gen_bool(0.8) {
            let p = rng.gen_range(0..v);
            rel.push((p, v));
            bags.push(vec![p, v]);
            // Bag `v` holds v and its parent; hang it on the parent's own bag.
            edges.push((p, v));
        } else {
            bags.push(vec![v]);
            edges.push((v - 1, v));
        }
    }
    GeneratorOutput {
        poset: Poset::new(n, &rel).expect("edges point to later elements"),
        decomposition: Some(TreeDecomposition::new(n, bags, edges)),
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedec::validate;

    fn assert_valid(out: &GeneratorOutput) -> usize {
        let td = out.decomposition.as_ref().unwrap();
        let r = validate(&out.poset.cover_graph(), td);
        assert!(r.is_valid(), "{r}");
        r.width
    }

    #[test]
    fn standard_small() {
        let s2 = standard_example(2).unwrap();
        assert_eq!(s2.poset.len(), 4);
        assert_eq!(s2.poset.covers(), &[(0, 3), (1, 2)]);
        let s5 = standard_example(5).unwrap();
        for i in 0..5 {
            assert_eq!(s5.poset.up_set(i).count(), 4);
        }
        let s3 = standard_example(3).unwrap();
        assert!(!s3.poset.leq(1, 4));
        assert!(matches!(standard_example(1), Err(Error::NTooSmall { .. })));
        assert_valid(&s5);
    }

    #[test]
    fn kelly_contains_standard_example() {
        for n in 3..9 {
            let out = kelly(n).unwrap();
            assert!(assert_valid(&out) <= 3);
            let w = out.witness.as_ref().unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    let (ai, bj) = (w[&format!("a{i}")], w[&format!("b{j}")]);
                    assert_eq!(out.poset.leq(ai, bj), i != j, "n={n} a{i} b{j}");
                    let aj = w[&format!("a{j}")];
                    let bi = w[&format!("b{i}")];
                    assert_eq!(out.poset.comparable(ai, aj), i == j);
                    assert_eq!(out.poset.comparable(bi, bj), i == j);
                    assert!(!out.poset.less(bj, ai));
                }
            }
        }
        assert!(kelly(2).is_err());
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        let a = random_bounded_tw(40, 3, 7);
        let b = random_bounded_tw(40, 3, 7);
        assert_eq!(a.poset, b.poset);
        assert_eq!(a.decomposition, b.decomposition);
        assert!(assert_valid(&a) <= 3);
        let one = random_bounded_tw(1, 3, 99);
        assert_eq!(one.poset.len(), 1);
        assert_eq!(one.decomposition.as_ref().unwrap().num_nodes(), 1);
    }

    #[test]
    fn simple_families_validate() {
        for n in [1, 2, 17] {
            assert_eq!(assert_valid(&chain(n)), usize::from(n > 1));
            assert_eq!(assert_valid(&antichain(n)), 0);
            assert!(assert_valid(&forest(n, n as u64)) <= 1);
        }
    }
}

use proptest::prelude::*;

use bdim::bp::{
    color_detect_build, color_detect_eval, set_membership_build, set_membership_decode, EdgeColor, EdgeColoring,
    Permutation, Side,
};
use bdim::generators;
use bdim::oracle::{path_scan_color_oracle, reachability, verify_all_pairs};
use bdim::reach::{condense_scc, digraph_to_poset, from_hex, to_hex, Digraph};
use bdim::realizer::{build, induce_perm};
use bdim::treedec::{heuristic_decompose, normalize, validate};
use bdim::{Graph, Poset, RootedTree};

fn tree_from(parents: &[usize]) -> RootedTree {
    let p: Vec<Option<usize>> = std::iter::once(None)
        .chain(parents.iter().enumerate().map(|(i, &r)| Some(r % (i + 1))))
        .collect();
    RootedTree::from_parents(&p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn perm_reverse_flips_order(seq in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
        let p = Permutation::new(seq).unwrap();
        let r = p.reverse();
        prop_assert_eq!(r.reverse(), p.clone());
        for x in 0..12 {
            for y in 0..12 {
                if x != y {
                    prop_assert_ne!(p.before(x, y), p.before(y, x));
                    prop_assert_eq!(r.before(x, y), p.before(y, x));
                }
            }
        }
    }

    #[test]
    fn membership_decodes(mask in 0u32..(1 << 10), size in 2usize..=10) {
        let v: Vec<usize> = (0..size).map(|i| 3 * i + 1).collect();
        let c: Vec<usize> = v.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &z)| z).collect();
        let perms = set_membership_build(&v, &c).unwrap();
        for &x in &v {
            for &y in &v {
                if x != y {
                    let bits = [perms[0].before(x, y), perms[1].before(x, y), perms[2].before(x, y)];
                    prop_assert_eq!(set_membership_decode(bits).unwrap(), (c.contains(&x), c.contains(&y)));
                }
            }
        }
    }

    #[test]
    fn color_detection_matches_scan(
        parents in prop::collection::vec(0usize..64, 0..30),
        paint in prop::collection::vec(0u8..3, 31),
    ) {
        let tree = tree_from(&parents);
        let n = tree.len();
        let mut colors = EdgeColoring::uncolored(n);
        let mut scan = vec![None; n];
        for v in 1..n {
            match paint[v] {
                1 => { colors.set(v, EdgeColor::Red); scan[v] = Some(true); }
                2 => { colors.set(v, EdgeColor::Green); scan[v] = Some(false); }
                _ => {}
            }
        }
        for side in [Side::X, Side::Y] {
            let (perms, program) = color_detect_build(&tree, &colors, side);
            for x in 0..n {
                for y in 0..n {
                    if x != y {
                        let bits: [bool; 5] = std::array::from_fn(|i| perms[i].before(x, y));
                        let want = path_scan_color_oracle(&tree, &scan, x, y, side == Side::X);
                        prop_assert_eq!(color_detect_eval(bits, side), want);
                        prop_assert_eq!(program.evaluate(&bdim::bp::OrderBits(bits.to_vec())).unwrap(), want);
                    }
                }
            }
        }
    }

    #[test]
    fn realizer_is_correct(n in 1usize..24, k in 1usize..4, seed in any::<u64>()) {
        let g = generators::random_bounded_tw(n, k, seed);
        let r = build(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
        let rep = verify_all_pairs(&g.poset, &r);
        prop_assert!(rep.pass, "{:?}", rep.mismatches.first());
    }

    #[test]
    fn realizer_with_heuristic_decomposition(n in 1usize..20, k in 1usize..4, seed in any::<u64>()) {
        let g = generators::random_bounded_tw(n, k, seed);
        let td = heuristic_decompose(&g.poset.cover_graph());
        let r = build(&g.poset, &td).unwrap();
        prop_assert!(verify_all_pairs(&g.poset, &r).pass);
    }

    #[test]
    fn induce_commutes_with_reverse(n in 1usize..30, k in 1usize..4, seed in any::<u64>()) {
        let g = generators::random_bounded_tw(n, k, seed);
        let nd = normalize(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
        let p = Permutation::new(nd.tree().preorder().to_vec()).unwrap();
        let ind = induce_perm(&p, &nd);
        prop_assert!(ind.is_permutation_of(n));
        prop_assert_eq!(induce_perm(&p.reverse(), &nd), ind.reverse());
    }

    #[test]
    fn heuristic_decompositions_validate(
        n in 1usize..25,
        edges in prop::collection::vec((0usize..25, 0usize..25), 0..60),
    ) {
        let g = Graph::from_edges(n, edges.into_iter().filter(|&(u, v)| u < n && v < n && u != v));
        let td = heuristic_decompose(&g);
        prop_assert!(validate(&g, &td).is_valid());
    }

    #[test]
    fn normalization_keeps_validity(n in 1usize..30, k in 1usize..4, seed in any::<u64>()) {
        let g = generators::random_bounded_tw(n, k, seed);
        let nd = normalize(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
        prop_assert!(validate(&g.poset.cover_graph(), nd.decomposition()).is_valid());
        let mut roots = nd.roots().to_vec();
        roots.sort_unstable();
        roots.dedup();
        prop_assert_eq!(roots.len(), n);
        prop_assert_eq!(nd.tree().root(), 0);
        prop_assert_eq!(nd.tree().preorder(), &(0..nd.tree().len()).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn condensation_preserves_reachability(
        n in 1usize..20,
        arcs in prop::collection::vec((0usize..20, 0usize..20), 0..50),
    ) {
        let arcs: Vec<(usize, usize)> = arcs.into_iter().filter(|&(u, v)| u < n && v < n).collect();
        let g = Digraph::from_arcs(n, arcs.iter().copied());
        let (dag, comp) = condense_scc(&g);
        let reach = reachability(n, &arcs);
        let p = digraph_to_poset(&dag).unwrap();
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(reach[u][v], p.leq(comp[u], comp[v]));
            }
        }
    }

    #[test]
    fn hex_round_trip(bits in prop::collection::vec(any::<bool>(), 0..64)) {
        let h = to_hex(&bits);
        prop_assert_eq!(from_hex(&h, bits.len()).unwrap(), bits);
    }

    #[test]
    fn poset_text_round_trip(n in 1usize..30, k in 1usize..4, seed in any::<u64>()) {
        let p = generators::random_bounded_tw(n, k, seed).poset;
        let back = Poset::parse(&p.to_text()).unwrap();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(back.leq(x, y), p.leq(x, y));
            }
        }
    }
}

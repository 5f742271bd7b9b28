use bdim::generators;
use bdim::oracle::{bruteforce_signature_exists, verify_all_pairs};
use bdim::realizer::{build, BuildOptions, Construction, Realizer};
use bdim::sigdag::enumerate_realized;

/// Instances where some extension splits into two nonempty halves.
fn split_instances() -> Vec<generators::GeneratorOutput> {
    vec![
        generators::random_bounded_tw(118, 3, 90_046),
        generators::random_bounded_tw(87, 3, 90_259),
    ]
}

#[test]
fn second_half_is_exercised_and_correct() {
    for g in split_instances() {
        let c = Construction::build(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
        assert!(c.extensions.iter().any(|e| !e.part2.is_empty()));
        let rep = verify_all_pairs(&g.poset, &c.realizer);
        assert!(rep.pass, "{} mismatches", rep.mismatches.len());
    }
}

#[test]
fn b_gamma_matches_paths_on_split_instance() {
    let g = &split_instances()[1];
    let td = g.decomposition.as_ref().unwrap();
    let probe = Construction::build(&g.poset, td).unwrap();
    let realized = enumerate_realized(&probe.sd.dag, &probe.sd.cd, &probe.nd).signatures();
    let c = Construction::build_with(
        &g.poset,
        td,
        &BuildOptions {
            extra_signatures: realized.iter().cloned().collect(),
        },
    )
    .unwrap();
    let tree = c.nd.tree();
    let n = g.poset.len();
    for gamma in realized.iter().filter(|s| s.len() >= 2) {
        for x in 0..n {
            for y in 0..n {
                let (rx, ry) = (c.nd.root_of(x), c.nd.root_of(y));
                let m = tree.meet(rx, ry);
                if x != y && m != rx {
                    assert_eq!(
                        c.eval_b_gamma(gamma, x, y).unwrap(),
                        bruteforce_signature_exists(&c.sd, tree, m, rx, gamma),
                        "{gamma:?} ({x}, {y})"
                    );
                }
            }
        }
    }
}

#[test]
fn builds_are_byte_stable() {
    let g = generators::kelly(6).unwrap();
    let td = g.decomposition.as_ref().unwrap();
    let a = build(&g.poset, td).unwrap().serialize();
    let b = build(&g.poset, td).unwrap().serialize();
    assert_eq!(a, b);
    let back = Realizer::deserialize(&a).unwrap();
    assert!(verify_all_pairs(&g.poset, &back).pass);
}

#[test]
fn identical_bits_identical_answers() {
    let g = generators::random_bounded_tw(30, 2, 3);
    let r = build(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
    let mut seen = std::collections::HashMap::new();
    for x in 0..30 {
        for y in 0..30 {
            let bits = r.bits(x, y).unwrap();
            let ans = r.query_bits(&bits).unwrap();
            assert_eq!(*seen.entry(bits).or_insert(ans), ans);
        }
    }
}

#[test]
fn meet_without_first_colour_rejects() {
    let g = generators::random_bounded_tw(25, 3, 17);
    let c = Construction::build(&g.poset, g.decomposition.as_ref().unwrap()).unwrap();
    let tree = c.nd.tree();
    let mut rejected = 0;
    for gamma in c.b_gamma.keys() {
        for x in 0..25 {
            for y in 0..25 {
                let (rx, ry) = (c.nd.root_of(x), c.nd.root_of(y));
                let m = tree.meet(rx, ry);
                if x != y && m != rx && c.sd.vertex_of_color(m, gamma[0]).is_none() {
                    assert!(!c.eval_b_gamma(gamma, x, y).unwrap());
                    rejected += 1;
                }
            }
        }
    }
    assert!(rejected > 0);
}

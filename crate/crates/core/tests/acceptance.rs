//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use bdim::bp::{color_detect_build, set_membership_build, set_membership_decode, EdgeColor, EdgeColoring, Side};
use bdim::generators::{self, GeneratorOutput};
use bdim::oracle::{
    bruteforce_signature_exists, bruteforce_two_seq, check_cd_colors, check_disjoint, check_unique_out_neighbor,
    path_scan_color_oracle, reachability, verify_all_pairs,
};
use bdim::reach::{build_labels, decode, Digraph};
use bdim::realizer::{b_gamma_budget, paper_bound, standard_example_realizer, within_paper_bound, BuildOptions, Construction};
use bdim::sigdag::enumerate_realized;
use bdim::RootedTree;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Instance {
    name: String,
    g: GeneratorOutput,
}

fn inst(name: String, g: GeneratorOutput) -> Instance {
    Instance { name, g }
}

/// The correctness corpus.
fn corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 2..=7 {
        out.push(inst(format!("S_{n}"), generators::standard_example(n).unwrap()));
    }
    for n in 3..=8 {
        out.push(inst(format!("kelly {n}"), generators::kelly(n).unwrap()));
    }
    for seed in 0..100u64 {
        let k = 1 + (seed % 3) as usize;
        let n = 5 + (seed as usize * 37) % 76;
        out.push(inst(format!("random n={n} k={k} seed={seed}"), generators::random_bounded_tw(n, k, seed)));
    }
    for n in [1, 2, 10, 50] {
        out.push(inst(format!("chain {n}"), generators::chain(n)));
        out.push(inst(format!("antichain {n}"), generators::antichain(n)));
    }
    for seed in 0..5 {
        out.push(inst(format!("forest 50 seed={seed}"), generators::forest(50, seed)));
    }
    out
}

/// Instances with at most 25 elements.
fn small_corpus(count: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 2..=5 {
        out.push(inst(format!("S_{n}"), generators::standard_example(n).unwrap()));
    }
    for n in 3..=6 {
        out.push(inst(format!("kelly {n}"), generators::kelly(n).unwrap()));
    }
    let mut seed = 1000u64;
    while out.len() < count {
        let k = 1 + (seed % 3) as usize;
        let n = 4 + (seed as usize * 11) % 22;
        out.push(inst(format!("random n={n} k={k} seed={seed}"), generators::random_bounded_tw(n, k, seed)));
        seed += 1;
    }
    out
}

struct Built {
    name: String,
    g: GeneratorOutput,
    c: Construction,
}

fn build_all(list: Vec<Instance>) -> Result<Vec<Built>, String> {
    list.into_iter()
        .map(|i| {
            let td = i.g.decomposition.as_ref().expect("generators supply decompositions");
            match Construction::build(&i.g.poset, td) {
                Ok(c) => Ok(Built { name: i.name, g: i.g, c }),
                Err(e) => Err(format!("{}: build failed: {e}", i.name)),
            }
        })
        .collect()
}

fn c1_correctness(built: &[Built]) -> Outcome {
    let mut pairs = 0;
    for b in built {
        let rep = verify_all_pairs(&b.g.poset, &b.c.realizer);
        pairs += rep.pairs_checked;
        if !rep.pass {
            let m = &rep.mismatches[0];
            return Err(format!(
                "{}: {} mismatches, first ({}, {}) expected {} got {:?}",
                b.name,
                rep.mismatches.len(),
                m.x,
                m.y,
                m.expected,
                m.got
            ));
        }
    }
    Ok(format!("{} instances, {pairs} ordered pairs, 0 mismatches", built.len()))
}

fn c2_unique_out(built: &[Built]) -> Outcome {
    for b in built {
        let chk = check_unique_out_neighbor(&b.g.poset, &b.c.nd, &b.c.sd);
        if !chk.ok {
            return Err(format!("{}: {}", b.name, chk.detail));
        }
    }
    let verts: usize = built.iter().map(|b| b.c.sd.dag.num_vertices()).sum();
    Ok(format!("{} instances, {verts} D vertices", built.len()))
}

fn c3_cd_colors(built: &[Built]) -> Outcome {
    for b in built {
        let chk = check_cd_colors(&b.c.sd, b.c.nd.tree().len());
        if !chk.ok {
            return Err(format!("{}: {}", b.name, chk.detail));
        }
    }
    Ok(format!("{} instances", built.len()))
}

fn c4_disjoint(built: &[Built]) -> Outcome {
    let mut families = 0;
    let (mut ext, mut with2) = (0, 0);
    for b in built {
        let mut lists: Vec<(String, Vec<Vec<usize>>)> = Vec::new();
        for (key, f) in &b.c.families {
            lists.push((format!("{key:?}"), f.members.iter().map(|m| m.nodes.clone()).collect()));
        }
        for (i, e) in b.c.extensions.iter().enumerate() {
            ext += 1;
            with2 += usize::from(!e.part2.is_empty());
            for (part, f) in [(1, &e.part1), (2, &e.part2)] {
                lists.push((format!("extension {i} part {part}"), f.members.iter().map(|m| m.nodes.clone()).collect()));
            }
        }
        families += lists.len();
        let chk = check_disjoint(lists.iter().map(|(n, m)| (n.clone(), m.as_slice())));
        if !chk.ok {
            return Err(format!("{}: {}", b.name, chk.detail));
        }
    }
    Ok(format!(
        "{families} families over {} instances ({ext} extensions, {with2} with a nonempty second half), no OddCycle",
        built.len()
    ))
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> RootedTree {
    let parents: Vec<Option<usize>> = (0..n).map(|v| if v == 0 { None } else { Some(rng.gen_range(0..v)) }).collect();
    RootedTree::from_parents(&parents)
}

fn c5_color_detect() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0usize;
    for trial in 0..500 {
        let n = rng.gen_range(1..=40);
        let tree = random_tree(&mut rng, n);
        let mut colors = EdgeColoring::uncolored(n);
        let mut scan = vec![None; n];
        let density: f64 = rng.gen();
        for v in 1..n {
            if rng.gen_bool(density) {
                let red = rng.gen_bool(0.5);
                colors.set(v, if red { EdgeColor::Red } else { EdgeColor::Green });
                scan[v] = Some(red);
            }
        }
        for side in [Side::X, Side::Y] {
            let (perms, _) = color_detect_build(&tree, &colors, side);
            for x in 0..n {
                for y in 0..n {
                    if x == y {
                        continue;
                    }
                    let bits: [bool; 5] = std::array::from_fn(|i| perms[i].before(x, y));
                    let got = bdim::bp::color_detect_eval(bits, side);
                    let want = path_scan_color_oracle(&tree, &scan, x, y, side == Side::X);
                    if got != want {
                        return Err(format!("tree {trial}, pair ({x}, {y}), side {side:?}: got {got}"));
                    }
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("500 trees, {pairs} pair/side checks"))
}

fn c6_membership() -> Outcome {
    let mut checks = 0usize;
    for size in 0..=9usize {
        let v: Vec<usize> = (0..size).collect();
        for mask in 0u32..(1 << size) {
            let c: Vec<usize> = v.iter().copied().filter(|&z| mask >> z & 1 == 1).collect();
            let perms = set_membership_build(&v, &c).map_err(|e| e.to_string())?;
            for &x in &v {
                for &y in &v {
                    if x == y {
                        continue;
                    }
                    let bits = [perms[0].before(x, y), perms[1].before(x, y), perms[2].before(x, y)];
                    let got = set_membership_decode(bits).map_err(|e| e.to_string())?;
                    if got != (mask >> x & 1 == 1, mask >> y & 1 == 1) {
                        return Err(format!("|V|={size}, C={c:?}, pair ({x}, {y})"));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (set, pair) checks"))
}

fn c7_b_gamma() -> Outcome {
    let mut checks = 0usize;
    let mut sigs = 0usize;
    let mut positive = 0usize;
    let mut longest = 0usize;
    let list = small_corpus(50);
    let count = list.len();
    for i in list {
        let td = i.g.decomposition.as_ref().unwrap();
        let nd = bdim::treedec::normalize(&i.g.poset, td).map_err(|e| e.to_string())?;
        let sd = bdim::sigdag::SignatureDag::build(&i.g.poset, &nd).map_err(|e| e.to_string())?;
        let realized = enumerate_realized(&sd.dag, &sd.cd, &nd).signatures();
        let opts = BuildOptions {
            extra_signatures: realized.iter().cloned().collect(),
        };
        let c = Construction::build_with(&i.g.poset, td, &opts).map_err(|e| format!("{}: {e}", i.name))?;
        let tree = c.nd.tree();
        let n = i.g.poset.len();
        for gamma in &realized {
            sigs += 1;
            longest = longest.max(gamma.len());
            for x in 0..n {
                for y in 0..n {
                    let (rx, ry) = (c.nd.root_of(x), c.nd.root_of(y));
                    let m = tree.meet(rx, ry);
                    if x == y || m == rx {
                        continue;
                    }
                    let got = c.eval_b_gamma(gamma, x, y).map_err(|e| e.to_string())?;
                    let want = bruteforce_signature_exists(&c.sd, tree, m, rx, gamma);
                    if got != want {
                        return Err(format!("{}: Γ={gamma:?}, pair ({x}, {y}): got {got}, expected {want}", i.name));
                    }
                    checks += 1;
                    positive += usize::from(want);
                }
            }
        }
    }
    Ok(format!(
        "{count} instances, {sigs} signatures (longest {longest}), {checks} checks, {positive} positive"
    ))
}

fn c8_two_seq() -> Outcome {
    let list = small_corpus(100);
    let count = list.len();
    let mut checks = 0usize;
    for i in list {
        let td = i.g.decomposition.as_ref().unwrap();
        let nd = bdim::treedec::normalize(&i.g.poset, td).map_err(|e| e.to_string())?;
        let sd = bdim::sigdag::SignatureDag::build(&i.g.poset, &nd).map_err(|e| e.to_string())?;
        let n = i.g.poset.len();
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    if bruteforce_two_seq(&nd, &sd, x, y) != i.g.poset.leq(x, y) {
                        return Err(format!("{}: pair ({x}, {y})", i.name));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{count} instances, {checks} pairs"))
}

fn c9_counting(built: &[Built]) -> Outcome {
    if paper_bound(0) != BigUint::from(6266u32) {
        return Err(format!("paper_bound(0) = {}", paper_bound(0)));
    }
    let mut subprograms = 0;
    let mut worst = 0.0f64;
    for b in built {
        let count = b.c.realizer.count_permutations();
        if !within_paper_bound(count, b.c.realizer.k() as u32) {
            return Err(format!("{}: {count} permutations exceed the bound for k={}", b.name, b.c.realizer.k()));
        }
        for (gamma, info) in &b.c.b_gamma {
            let budget = b_gamma_budget(gamma.len());
            if info.bits.len() as u128 > budget {
                return Err(format!("{}: Γ={gamma:?} uses {} permutations, budget {budget}", b.name, info.bits.len()));
            }
            worst = worst.max(info.bits.len() as f64 / budget as f64);
            subprograms += 1;
        }
    }
    Ok(format!(
        "paper_bound(0)=6266; {} realizers within bound; {subprograms} subprograms within budget (max ratio {worst:.2})",
        built.len()
    ))
}

fn c10_kelly() -> Outcome {
    let mut counts = Vec::new();
    for n in 3..=10 {
        let g = generators::kelly(n).unwrap();
        let c = Construction::build(&g.poset, g.decomposition.as_ref().unwrap()).map_err(|e| e.to_string())?;
        counts.push((n, c.realizer.count_permutations()));
    }
    let at6 = counts.iter().find(|(n, _)| *n == 6).unwrap().1;
    let text = counts.iter().map(|(n, c)| format!("{n}:{c}")).collect::<Vec<_>>().join(" ");
    if counts.iter().all(|&(_, c)| c <= at6) {
        Ok(format!("counts {text}; all <= {at6}"))
    } else {
        Err(format!("counts {text}; some exceed the n=6 value {at6}"))
    }
}

fn c11_standard() -> Outcome {
    for n in 2..=64 {
        let r = standard_example_realizer(n).map_err(|e| e.to_string())?;
        let p = generators::standard_example(n).unwrap().poset;
        if r.count_permutations() > 4 {
            return Err(format!("n={n}: {} permutations", r.count_permutations()));
        }
        let rep = verify_all_pairs(&p, &r);
        if !rep.pass {
            return Err(format!("n={n}: {} mismatches", rep.mismatches.len()));
        }
    }
    Ok("n=2..64, 4 permutations, 0 mismatches".into())
}

/// A digraph whose condensation is the random bounded-width poset `g`:
/// element `i` keeps id `i`, some elements grow into directed cycles through
/// extra vertices, and a few redundant arcs, loops and parallel arcs are added.
fn digraph_from(g: &GeneratorOutput, rng: &mut ChaCha8Rng) -> Digraph {
    let n = g.poset.len();
    let mut arcs: Vec<(usize, usize)> = g.poset.covers().to_vec();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut next = n;
    for (i, m) in members.iter_mut().enumerate() {
        if next + 2 <= 120 && rng.gen_bool(0.2) {
            let extra = rng.gen_range(1..=2);
            let mut cycle = vec![i];
            for _ in 0..extra {
                cycle.push(next);
                next += 1;
            }
            for w in 0..cycle.len() {
                arcs.push((cycle[w], cycle[(w + 1) % cycle.len()]));
            }
            m.extend(&cycle[1..]);
        }
    }
    // Re-route some cover arcs through other members of the same components.
    let covers = g.poset.covers().to_vec();
    for &(x, y) in &covers {
        if rng.gen_bool(0.3) {
            let u = members[x][rng.gen_range(0..members[x].len())];
            let v = members[y][rng.gen_range(0..members[y].len())];
            arcs.push((u, v));
        }
    }
    for _ in 0..n / 4 {
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        if x != y && g.poset.less(x, y) {
            arcs.push((x, y));
        }
        if rng.gen_bool(0.5) {
            arcs.push((x, x));
        }
    }
    Digraph::from_arcs(next, arcs)
}

fn c12_labels() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut pairs = 0usize;
    for i in 0..100u64 {
        let k = 1 + (i % 3) as usize;
        let np = 10 + (i as usize * 29) % 71;
        let g = generators::random_bounded_tw(np, k, 5000 + i);
        let dg = digraph_from(&g, &mut rng);
        let n = dg.num_vertices();
        if n > 120 {
            return Err(format!("digraph {i} has {n} vertices"));
        }
        let td = if i % 2 == 0 { g.decomposition.as_ref() } else { None };
        let scheme = build_labels(&dg, td).map_err(|e| format!("digraph {i}: {e}"))?;
        let desc = scheme.descriptor();
        let comps = scheme.comp.iter().collect::<BTreeSet<_>>().len();
        let w = if comps <= 1 { 0 } else { (comps as f64).log2().ceil() as usize };
        if scheme.bits_per_label() != w * scheme.realizer.count_permutations()
            || scheme.labels.iter().any(|l| l.len() != scheme.bits_per_label())
        {
            return Err(format!("digraph {i}: label size {} != {w}*d", scheme.bits_per_label()));
        }
        let arcs: Vec<(usize, usize)> = dg.arcs().collect();
        let reach = reachability(n, &arcs);
        for u in 0..n {
            for v in 0..n {
                let got = decode(&scheme.labels[u], &scheme.labels[v], &desc).map_err(|e| e.to_string())?;
                if got != reach[u][v] {
                    return Err(format!("digraph {i}: pair ({u}, {v}) decoded {got}"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("100 digraphs, {pairs} pairs, label sizes exact"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let built = build_all(corpus());
    let with_built = |f: fn(&[Built]) -> Outcome| -> Outcome {
        match &built {
            Ok(b) => f(b),
            Err(e) => Err(e.clone()),
        }
    };
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("realizer correctness on the corpus", Box::new(|| with_built(c1_correctness))),
        ("unique out-neighbour per tree edge", Box::new(|| with_built(c2_unique_out))),
        ("c_D colours distinct per level, non-increasing", Box::new(|| with_built(c3_cd_colors))),
        ("family disjointness", Box::new(|| with_built(c4_disjoint))),
        ("colour detection vs path scan", Box::new(c5_color_detect)),
        ("set membership exhaustive", Box::new(c6_membership)),
        ("B_Γ vs signature brute force", Box::new(c7_b_gamma)),
        ("two-path characterization vs leq", Box::new(c8_two_seq)),
        ("permutation counts", Box::new(|| with_built(c9_counting))),
        ("Kelly counts bounded by n=6", Box::new(c10_kelly)),
        ("standard example with 4 permutations", Box::new(c11_standard)),
        ("reachability labels", Box::new(c12_labels)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of 12 passed in {:.1}s", 12 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bdim::generators::{self, GeneratorOutput};
use bdim::oracle::{self, verify_all_pairs};
use bdim::reach::{self, Descriptor, Digraph};
use bdim::realizer::{self, paper_bound, paper_bound_log2, Construction};
use bdim::treedec::{heuristic_decompose, validate};
use bdim::{Error, Poset, Realizer, TreeDecomposition};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "bdim", version, about = "Boolean realizers and reachability labels for posets of bounded tree-width")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Standard,
    Kelly,
    RandomTw,
    Chain,
    Antichain,
    Forest,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a poset and, when known, a decomposition of its cover graph.
    Gen {
        kind: Kind,
        n: usize,
        /// Width bound for `random-tw`.
        k: Option<usize>,
        /// Seed for `random-tw` and `forest`.
        seed: Option<u64>,
        /// Write PREFIX.poset and PREFIX.td instead of printing the poset.
        #[arg(long, value_name = "PREFIX")]
        out: Option<PathBuf>,
    },
    /// Heuristic tree decomposition of a poset's cover graph.
    Decompose {
        poset: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a realizer and print one line of statistics.
    Build {
        poset: PathBuf,
        /// Decomposition of the cover graph; a heuristic one otherwise.
        #[arg(long)]
        td: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer `x <= y` (1-based ids) from a realizer file.
    Query { realizer: PathBuf, x: usize, y: usize },
    /// Check a realizer against its poset on every ordered pair.
    Verify { poset: PathBuf, realizer: PathBuf },
    /// Reachability labels for a digraph.
    Label {
        digraph: PathBuf,
        /// Decomposition of the condensation's cover graph.
        #[arg(long)]
        td: Option<PathBuf>,
        /// Write PREFIX.labels and PREFIX.desc.json.
        #[arg(long, value_name = "PREFIX")]
        out: PathBuf,
    },
    /// Decide reachability from two hex labels and a descriptor.
    Decode { descriptor: PathBuf, from: String, to: String },
    /// Print what a realizer file records about itself.
    Stats { realizer: PathBuf },
    /// Run a compact property suite.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// A failure with the process exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::IdOutOfRange { .. } | Error::NTooSmall { .. } => 2,
            Error::Io(_) => 1,
            Error::Syntax { .. }
            | Error::InconsistentHeader(_)
            | Error::InvalidDecomposition(_)
            | Error::CycleDetected(..)
            | Error::CorruptPayload(_)
            | Error::VersionMismatch { .. }
            | Error::LengthMismatch { .. } => 3,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure { code, msg: msg.into() }
}

type Run = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Run {
    fs::write(path, text).map_err(|e| fail(1, format!("{}: {e}", path.display())))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

fn load_td(path: &Path) -> Result<TreeDecomposition, Failure> {
    Ok(TreeDecomposition::parse_td(&read(path)?)?)
}

fn load_realizer(path: &Path) -> Result<Realizer, Failure> {
    Ok(Realizer::deserialize(&read(path)?)?)
}

fn bound_text(k: usize) -> String {
    if k <= 1 {
        paper_bound(k as u32).to_string()
    } else {
        format!("2^{:.1}", paper_bound_log2(k as u32))
    }
}

fn gen(kind: Kind, n: usize, k: Option<usize>, seed: Option<u64>) -> Result<GeneratorOutput, Failure> {
    Ok(match kind {
        Kind::Standard => generators::standard_example(n)?,
        Kind::Kelly => generators::kelly(n)?,
        Kind::RandomTw => {
            let k = k.ok_or_else(|| fail(2, "random-tw needs a width bound k"))?;
            if n == 0 || k == 0 {
                return Err(fail(2, "random-tw needs n >= 1 and k >= 1"));
            }
            generators::random_bounded_tw(n, k, seed.unwrap_or(0))
        }
        Kind::Chain | Kind::Antichain | Kind::Forest if n == 0 => return Err(fail(2, "n must be at least 1")),
        Kind::Chain => generators::chain(n),
        Kind::Antichain => generators::antichain(n),
        Kind::Forest => generators::forest(n, seed.unwrap_or(0)),
    })
}

/// Checks `td` against the cover graph and prints the violations on failure.
fn checked_td(p: &Poset, td: &TreeDecomposition) -> Run {
    let report = validate(&p.cover_graph(), td);
    if report.is_valid() {
        Ok(())
    } else {
        Err(fail(3, format!("invalid decomposition\n{report}")))
    }
}

fn run(cli: Cli) -> Run {
    let json = cli.json;
    match cli.cmd {
        Cmd::Gen { kind, n, k, seed, out } => {
            let g = gen(kind, n, k, seed)?;
            match out {
                Some(prefix) => {
                    write(&with_ext(&prefix, ".poset"), &g.poset.to_text())?;
                    if let Some(td) = &g.decomposition {
                        write(&with_ext(&prefix, ".td"), &td.to_td())?;
                    }
                    if json {
                        println!("{}", json!({"elements": g.poset.len(), "covers": g.poset.covers().len()}));
                    }
                }
                None => print!("{}", g.poset.to_text()),
            }
        }
        Cmd::Decompose { poset, out } => {
            let p = Poset::parse(&read(&poset)?)?;
            let td = heuristic_decompose(&p.cover_graph());
            match out {
                Some(path) => {
                    write(&path, &td.to_td())?;
                    if json {
                        println!("{}", json!({"bags": td.num_nodes(), "width": td.width()}));
                    } else {
                        println!("width {}", td.width());
                    }
                }
                None => print!("{}", td.to_td()),
            }
        }
        Cmd::Build { poset, td, out } => {
            let p = Poset::parse(&read(&poset)?)?;
            let td = match td {
                Some(path) => load_td(&path)?,
                None => heuristic_decompose(&p.cover_graph()),
            };
            checked_td(&p, &td)?;
            let c = Construction::build(&p, &td)?;
            let r = &c.realizer;
            write(&out, &r.serialize())?;
            let m = r.metadata();
            let k = r.k();
            if json {
                println!(
                    "{}",
                    json!({
                        "n": m.n, "k": k, "d_vertices": m.d_vertices, "signatures": m.signatures,
                        "permutations": r.count_permutations(), "bound": bound_text(k),
                        "within_bound": realizer::within_paper_bound(r.count_permutations(), k as u32),
                    })
                );
            } else {
                println!(
                    "n={} k={} |D|={} signatures={} permutations={} bound={}",
                    m.n,
                    k,
                    m.d_vertices,
                    m.signatures,
                    r.count_permutations(),
                    bound_text(k)
                );
            }
        }
        Cmd::Query { realizer, x, y } => {
            let r = load_realizer(&realizer)?;
            let n = r.num_elements();
            for id in [x, y] {
                if id == 0 || id > n {
                    return Err(Error::IdOutOfRange { id, n }.into());
                }
            }
            let ans = r.query(x - 1, y - 1)?;
            if json {
                println!("{}", json!({"x": x, "y": y, "leq": ans}));
            } else {
                println!("{}", u8::from(ans));
            }
        }
        Cmd::Verify { poset, realizer } => {
            let p = Poset::parse(&read(&poset)?)?;
            let r = load_realizer(&realizer)?;
            let rep = verify_all_pairs(&p, &r);
            if json {
                println!("{}", rep.to_json());
            } else {
                println!(
                    "pairs={} mismatches={} {}",
                    rep.pairs_checked,
                    rep.mismatches.len(),
                    if rep.pass { "PASS" } else { "FAIL" }
                );
                for m in rep.mismatches.iter().take(10) {
                    println!("  ({}, {}) expected {} got {:?}", m.x + 1, m.y + 1, u8::from(m.expected), m.got.map(u8::from));
                }
            }
            if !rep.pass {
                return Err(fail(4, "verification failed"));
            }
        }
        Cmd::Label { digraph, td, out } => {
            let g = Digraph::parse(&read(&digraph)?)?;
            let td = td.map(|p| load_td(&p)).transpose()?;
            if let Some(td) = &td {
                let (dag, _) = reach::condense_scc(&g);
                checked_td(&reach::digraph_to_poset(&dag)?, td)?;
            }
            let s = reach::build_labels(&g, td.as_ref())?;
            write(&with_ext(&out, ".labels"), &s.export())?;
            write(&with_ext(&out, ".desc.json"), &s.descriptor().to_json())?;
            if json {
                println!(
                    "{}",
                    json!({"vertices": s.labels.len(), "permutations": s.realizer.count_permutations(),
                           "field_width": s.field_width, "bits_per_label": s.bits_per_label()})
                );
            } else {
                println!(
                    "vertices={} permutations={} field_width={} bits_per_label={}",
                    s.labels.len(),
                    s.realizer.count_permutations(),
                    s.field_width,
                    s.bits_per_label()
                );
            }
        }
        Cmd::Decode { descriptor, from, to } => {
            let desc = Descriptor::from_json(&read(&descriptor)?)?;
            let len = desc.bits_per_label();
            let (a, b) = (reach::from_hex(&from, len)?, reach::from_hex(&to, len)?);
            let ans = reach::decode(&a, &b, &desc)?;
            if json {
                println!("{}", json!({"reachable": ans}));
            } else {
                println!("{}", u8::from(ans));
            }
        }
        Cmd::Stats { realizer } => {
            let r = load_realizer(&realizer)?;
            let m = r.metadata();
            if json {
                println!("{}", serde_json::to_string(m).expect("metadata serializes"));
            } else {
                println!(
                    "construction={} n={} k={} tree_nodes={} |D|={} signatures={} pairs={} permutations={} program_nodes={}",
                    m.construction,
                    m.n,
                    r.k(),
                    m.tree_nodes,
                    m.d_vertices,
                    m.signatures,
                    m.signature_pairs,
                    r.count_permutations(),
                    m.program_nodes
                );
            }
        }
        Cmd::Selftest { seed } => selftest(seed, json)?,
    }
    Ok(())
}

fn selftest(seed: u64, json: bool) -> Run {
    let mut results: Vec<(String, Result<(), String>)> = Vec::new();
    let mut check = |name: &str, r: Result<(), String>| results.push((name.to_string(), r));

    let mut corpus: Vec<(String, GeneratorOutput)> = Vec::new();
    for n in 2..=5 {
        corpus.push((format!("standard {n}"), generators::standard_example(n)?));
    }
    for n in 3..=6 {
        corpus.push((format!("kelly {n}"), generators::kelly(n)?));
    }
    for i in 0..20 {
        let s = seed.wrapping_mul(1000).wrapping_add(i);
        corpus.push((format!("random-tw seed {s}"), generators::random_bounded_tw(5 + (i as usize * 7) % 30, 1 + (i as usize % 3), s)));
    }
    corpus.push(("chain 10".into(), generators::chain(10)));
    corpus.push(("antichain 10".into(), generators::antichain(10)));
    corpus.push(("forest 20".into(), generators::forest(20, seed)));

    let mut realizers = Ok(());
    let mut structure = Ok(());
    let mut two_seq = Ok(());
    for (name, g) in &corpus {
        let td = g.decomposition.as_ref().expect("generators supply decompositions");
        let c = match Construction::build(&g.poset, td) {
            Ok(c) => c,
            Err(e) => {
                realizers = Err(format!("{name}: {e}"));
                continue;
            }
        };
        if realizers.is_ok() && !verify_all_pairs(&g.poset, &c.realizer).pass {
            realizers = Err(format!("{name}: mismatches"));
        }
        let checks = [
            oracle::check_unique_out_neighbor(&g.poset, &c.nd, &c.sd),
            oracle::check_cd_colors(&c.sd, c.nd.tree().len()),
        ];
        if let Some(bad) = checks.iter().find(|c| !c.ok) {
            structure = Err(format!("{name}: {} {}", bad.name, bad.detail));
        }
        let n = g.poset.len();
        for x in 0..n {
            for y in 0..n {
                if x != y && oracle::bruteforce_two_seq(&c.nd, &c.sd, x, y) != g.poset.leq(x, y) {
                    two_seq = Err(format!("{name}: pair ({}, {})", x + 1, y + 1));
                }
            }
        }
    }
    check("realizers agree with the order", realizers);
    check("D structure and colours", structure);
    check("two-path characterization", two_seq);

    let standard = (2..=16).try_for_each(|n| {
        let r = realizer::standard_example_realizer(n).map_err(|e| e.to_string())?;
        let p = generators::standard_example(n).map_err(|e| e.to_string())?.poset;
        if r.count_permutations() <= 4 && verify_all_pairs(&p, &r).pass {
            Ok(())
        } else {
            Err(format!("n={n}"))
        }
    });
    check("standard example with 4 permutations", standard);

    let labels = (0..10).try_for_each(|i| {
        let g = generators::random_bounded_tw(10 + 3 * i, 2, seed.wrapping_add(i as u64));
        let dg = Digraph::from_arcs(g.poset.len(), g.poset.covers().iter().copied());
        let s = reach::build_labels(&dg, None).map_err(|e| e.to_string())?;
        let desc = s.descriptor();
        let arcs: Vec<_> = dg.arcs().collect();
        let closure = oracle::reachability(dg.num_vertices(), &arcs);
        for u in 0..dg.num_vertices() {
            for v in 0..dg.num_vertices() {
                if reach::decode(&s.labels[u], &s.labels[v], &desc).map_err(|e| e.to_string())? != closure[u][v] {
                    return Err(format!("digraph {i}: pair ({}, {})", u + 1, v + 1));
                }
            }
        }
        Ok(())
    });
    check("reachability labels", labels);

    let failed = results.iter().filter(|(_, r)| r.is_err()).count();
    if json {
        let items: Vec<_> = results
            .iter()
            .map(|(n, r)| json!({"name": n, "pass": r.is_ok(), "detail": r.as_ref().err()}))
            .collect();
        println!("{}", json!({"pass": failed == 0, "checks": items}));
    } else {
        for (name, r) in &results {
            match r {
                Ok(()) => println!("PASS {name}"),
                Err(d) => println!("FAIL {name}: {d}"),
            }
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(fail(1, format!("{failed} selftest checks failed")))
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

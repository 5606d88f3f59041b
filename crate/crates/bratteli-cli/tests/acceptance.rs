//! Acceptance checks, one PASS/FAIL line each. Exits non-zero if any fail.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use bratteli::diagram::telescope;
use bratteli::fixtures;
use bratteli::hgraph::{build_graph, crossing_numbers, positively_strong};
use bratteli::infinitesimal::{apply_matrix, epsilon_family, epsilon_vector, independence_rank, perron_pairing_check};
use bratteli::io::load_bundle;
use bratteli::ordering::telescope_order;
use bratteli::synth::{
    solve_decomposition, synthesize_stationary, synthesize_vertex_order,
    BalanceDecomposition, SynthesizedOrder, WalkPolicy,
};
use bratteli::verify::{
    brute_force_orders, check_perfect_finite_rank, class_a_obstruction,
    stationary_triples, stationary_verdict, telescoped_block, CensusMode, CensusOptions, ObstructionVerdict,
    StationaryTriple,
};
use bratteli::{BratteliDiagram, Correspondence, DiagramOrder, IncidenceMatrix, Skeleton};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

/// Letter counts, endpoints and the successor law for a word over `V_n`
/// ordering `r^{-1}(u)` at level `n + 1`.
fn word_ok(b: &BratteliDiagram, skel: &Skeleton, sigma: &Correspondence, n: usize, u: usize, w: &[usize]) -> Result<(), String> {
    let f = b.incidence_matrix(n).map_err(e)?;
    let mut counts = vec![0u64; f.cols()];
    for &x in w {
        counts[x] += 1;
    }
    ensure(counts == f.row(u), format!("letter counts {counts:?} at ({n},{u})"))?;
    ensure(w[0] == skel.mu(n + 1, u) && *w.last().unwrap() == skel.tau(n + 1, u), "endpoints")?;
    for p in w.windows(2) {
        ensure(sigma.contains(n - 1, skel.tau(n, p[0]), skel.mu(n, p[1])), format!("successor law at {p:?}"))?;
    }
    Ok(())
}

/// `word_ok` plus cell visits equal to the crossing numbers.
fn eulerian_ok(
    b: &BratteliDiagram,
    skel: &Skeleton,
    sigma: &Correspondence,
    run: &SynthesizedOrder,
) -> Result<(), String> {
    let (n, u, w) = (run.level - 1, run.target, &run.word);
    word_ok(b, skel, sigma, n, u, w)?;
    let g = build_graph(b, skel, sigma, n).map_err(e)?;
    let c = crossing_numbers(b, skel, &g, u).map_err(e)?;
    ensure(run.cell_visits == c.counts, "cell visits differ from crossing numbers")?;
    let mut visits = vec![0u64; g.len()];
    for &x in &w[..w.len() - 1] {
        visits[g.partition.cell_of[x]] += 1;
    }
    ensure(visits == c.counts, "recounted visits differ")
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let text = std::fs::read_to_string(fixture_path("example_2_6")).map_err(e)?;
    let bundle = load_bundle(&text).map_err(e)?;
    let omega = bundle.order.ok_or("fixture has no order")?;
    let v = check_perfect_finite_rank(&bundle.diagram, &omega, bundle.diagram.depth()).map_err(e)?;
    let elapsed = start.elapsed();
    ensure(v.is_perfect(), format!("status {:?}", v.status))?;
    let labels = v.bijection_labels.clone().unwrap_or_default();
    let want = vec![("a".into(), "b".into()), ("b".into(), "c".into()), ("c".into(), "a".into())];
    ensure(labels == want, format!("bijection {labels:?}"))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("PERFECT_UP_TO_DEPTH, a->b b->c c->a, {elapsed:?}"))
}

fn criterion_2(runs: &mut usize) -> Check {
    let g = fixtures::growing_example(5);
    ensure(g.diagram.incidence_matrix(3).map_err(e)?.row(1) == [1, 2, 1], "row is not (1,2,1)")?;
    let dec = solve_decomposition(&g.diagram, &g.skeleton, &g.sigma, 3, 1).map_err(e)?.map_err(|i| i.reason)?;
    let start = Instant::now();
    let run = synthesize_vertex_order(&g.diagram, &g.skeleton, &g.sigma, 3, 1, &dec, WalkPolicy::Greedy).map_err(e)?;
    let elapsed = start.elapsed();
    eulerian_ok(&g.diagram, &g.skeleton, &g.sigma, &run)?;
    *runs += 1;
    let word = g.diagram.word_string(3, &run.word);
    ensure(word == "v2 v3 v1 v2", format!("word {word}"))?;
    ensure(elapsed < Duration::from_millis(100), format!("took {elapsed:?}"))?;
    Ok(format!("{word}, {elapsed:?}"))
}

fn criterion_3(runs: &mut usize) -> Check {
    let g = fixtures::set_valued_example(6);
    let (b, skel, sigma) = (&g.diagram, &g.skeleton, &g.sigma);
    let dec = BalanceDecomposition::new(4, 0, &fixtures::set_valued_decomposition());
    let run = synthesize_vertex_order(b, skel, sigma, 4, 0, &dec, WalkPolicy::Greedy).map_err(e)?;
    eulerian_ok(b, skel, sigma, &run)?;
    *runs += 1;
    let printed: [Vec<usize>; 2] = [vec![0, 1, 1, 2, 3, 0, 2, 3, 0, 3, 0], vec![0, 1, 1, 2, 3, 0, 3, 0, 2, 3, 0]];
    ensure(printed.contains(&run.word), format!("word {:?} is not a printed word", run.word))?;
    for w in &printed {
        word_ok(b, skel, sigma, 4, 0, w).map_err(|m| format!("printed word {w:?}: {m}"))?;
    }
    Ok(format!("synthesized {}, both printed words follow H_4", b.word_string(4, &run.word)))
}

fn criterion_4() -> Check {
    let g = fixtures::example_4_4(3);
    let graph = build_graph(&g.diagram, &g.skeleton, &g.sigma, 2).map_err(e)?;
    let c = crossing_numbers(&g.diagram, &g.skeleton, &graph, 3).map_err(e)?;
    let pc = positively_strong(&graph, &c);
    ensure(!pc.strongly_connected, "row d is positively strongly connected")?;
    let (x, y) = pc.witness.ok_or("no witness")?;
    let witness = format!("no path from {} to {}", graph.cell_labels[x], graph.cell_labels[y]);
    ensure(witness == "no path from [c,c] to [b,a]", witness.clone())?;
    let out = Command::new(env!("CARGO_BIN_EXE_bratteli"))
        .args(["synthesize", "--diagram", fixture_path("example_4_4").to_str().unwrap(), "--no-timestamp"])
        .output()
        .map_err(e)?;
    ensure(out.status.code() == Some(1), format!("exit {:?}", out.status.code()))?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(stdout.contains(&witness), "CLI report lacks the witness")?;
    Ok(format!("{witness}; synthesize exits 1"))
}

fn criterion_5() -> Check {
    let fx = fixtures::example_5_2(4);
    let (b, skel, sigma) = (&fx.diagram, &fx.skeleton, &fx.sigma);
    let ea = epsilon_vector(b, skel, sigma, 2, 0, 1).map_err(e)?;
    let eb = epsilon_vector(b, skel, sigma, 2, 1, 1).map_err(e)?;
    ensure(ea.entries == [0, 0, -1, 1], format!("eps_a {:?}", ea.entries))?;
    ensure(eb.entries == [0, 0, 1, -1], format!("eps_b {:?}", eb.entries))?;
    let mut family = 0;
    for a in 0..3 {
        for bb in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let f = fixtures::example_5_2_family([[1, 2], [2, 1], [1, 1], [3, 0]], a, bb, c, d);
                    ensure(apply_matrix(&f, &ea.entries).map_err(e)? == ea.entries, "F eps_a != eps_a")?;
                    family += 1;
                }
            }
        }
    }
    let r = independence_rank(&[ea.entries.clone(), eb.entries.clone()]).map_err(e)?;
    ensure(r.rank == 1 && r.dependency == Some(vec![1, 1]), format!("{r:?}"))?;
    let fx3 = fixtures::example_5_3(4);
    let other = epsilon_vector(&fx3.diagram, &fx3.skeleton, &fx3.sigma, 2, 0, 1).map_err(e)?;
    ensure(other.entries == [1, -1, 0, 0], format!("eps' {:?}", other.entries))?;
    let r3 = independence_rank(&[ea.entries.clone(), other.entries.clone()]).map_err(e)?;
    ensure(r3.rank == 2 && r3.dependency.is_none(), format!("{r3:?}"))?;
    Ok(format!("eps_a+eps_b=0, rank 1; {family} family members fix eps_a; second pair rank 2"))
}

struct Instance {
    f: IncidenceMatrix,
}

fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

fn is_primitive(f: &IncidenceMatrix) -> bool {
    let d = f.rows();
    let mut p = f.clone();
    for _ in 0..(d - 1) * (d - 1) + 1 {
        if p.is_positive() {
            return true;
        }
        p = match f.checked_mul(&p) {
            Ok(x) => x,
            Err(_) => return false,
        };
    }
    p.is_positive()
}

/// Random primitive blocks, sizes 2 to 4, entries at most 3, with
/// `Π |r^{-1}(v)|! <= 1e5`.
fn corpus(count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    while out.len() < count {
        let d = 2 + out.len() % 3;
        let rows: Vec<Vec<u64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(0..=3)).collect()).collect();
        let size: u128 = rows.iter().map(|r| factorial(r.iter().sum())).product();
        if size > 100_000 || rows.iter().any(|r| r.iter().sum::<u64>() == 0) {
            continue;
        }
        let f = IncidenceMatrix::from_rows(rows.clone()).unwrap();
        if is_primitive(&f) && seen.insert(rows) {
            out.push(Instance { f });
        }
    }
    out
}

fn nth_power(f: &[usize], p: usize) -> Vec<usize> {
    let mut g: Vec<usize> = (0..f.len()).collect();
    for _ in 0..p {
        g = g.iter().map(|&x| f[x]).collect();
    }
    g
}

fn idempotent(f: &[usize]) -> bool {
    (0..f.len()).all(|x| f[f[x]] == f[x])
}

/// The stationary diagram of `F^p` and its triples passing every hypothesis.
struct Power {
    b: BratteliDiagram,
    triples: Vec<(StationaryTriple, Skeleton, Correspondence)>,
}

fn power(f: &IncidenceMatrix, p: usize) -> Power {
    let fp = f.checked_pow(p as u32).unwrap();
    let b = BratteliDiagram::stationary(fp.clone(), 3).unwrap();
    let triples = stationary_triples(&fp)
        .unwrap()
        .into_iter()
        .filter(|t| t.synthesizable())
        .map(|t| {
            let skel = t.triple.skeleton(&b).unwrap();
            let sigma = t.triple.correspondence(3);
            (t.triple, skel, sigma)
        })
        .collect();
    Power { b, triples }
}

/// Whether the stationary order with this block is one the construction can
/// output: after telescoping to idempotent extremal sources, some triple
/// passing every hypothesis has these sources and every word walks its graph.
fn constructible(f: &IncidenceMatrix, block: &[Vec<usize>], powers: &mut HashMap<usize, Power>) -> bool {
    let tau: Vec<usize> = block.iter().map(|w| *w.last().unwrap()).collect();
    let mu: Vec<usize> = block.iter().map(|w| w[0]).collect();
    let mut p = 1;
    while !(idempotent(&nth_power(&tau, p)) && idempotent(&nth_power(&mu, p))) {
        p += 1;
    }
    let (tp, mp) = (nth_power(&tau, p), nth_power(&mu, p));
    let words = telescoped_block(block, p);
    let pw = powers.entry(p).or_insert_with(|| power(f, p));
    pw.triples.iter().filter(|(t, _, _)| t.tau == tp && t.mu == mp).any(|(_, skel, sigma)| {
        words.iter().enumerate().all(|(u, w)| word_ok(&pw.b, skel, sigma, 2, u, w).is_ok())
    })
}

struct CorpusResult {
    instances: usize,
    orders: usize,
    perfect: usize,
    synthesized: usize,
    verdict_mismatch: Vec<String>,
    constructible: usize,
    synth_not_perfect: Vec<String>,
    unbalanced: Vec<String>,
    telescope_mismatch: Vec<String>,
    telescope_sampled: usize,
    eulerian_failures: Vec<String>,
    runs: usize,
    elapsed: Duration,
}

fn run_corpus() -> CorpusResult {
    let start = Instant::now();
    let instances = corpus(60);
    let mut r = CorpusResult {
        instances: instances.len(),
        orders: 0,
        perfect: 0,
        synthesized: 0,
        verdict_mismatch: Vec::new(),
        constructible: 0,
        synth_not_perfect: Vec::new(),
        unbalanced: Vec::new(),
        telescope_mismatch: Vec::new(),
        telescope_sampled: 0,
        eulerian_failures: Vec::new(),
        runs: 0,
        elapsed: Duration::ZERO,
    };
    let mut sample = ChaCha8Rng::seed_from_u64(7);
    for (i, inst) in instances.iter().enumerate() {
        let f = &inst.f;
        let tag = format!("#{i} {:?}", f.to_rows());
        let b = BratteliDiagram::stationary(f.clone(), 3).unwrap();
        let census = brute_force_orders(&b, &CensusOptions::new(CensusMode::Stationary, 100_000)).unwrap();
        r.orders += census.entries.len();
        r.perfect += census.perfect;

        let triples = stationary_triples(f).unwrap();
        let good: BTreeSet<StationaryTriple> =
            triples.iter().filter(|t| t.synthesizable()).map(|t| t.triple.clone()).collect();

        for t in &good {
            let skel = t.skeleton(&b).unwrap();
            let sigma = t.correspondence(3);
            match synthesize_stationary(&b, &skel, &sigma, WalkPolicy::Guarded) {
                Ok((block, syn)) => {
                    r.synthesized += 1;
                    for run in &syn.runs {
                        r.runs += 1;
                        let deep = b.extend_to(3).unwrap();
                        if let Err(m) = eulerian_ok(&deep, &skel, &sigma, run) {
                            r.eulerian_failures.push(format!("{tag}: {m}"));
                        }
                    }
                    match census.entries.iter().find(|e| e.words[0] == block) {
                        Some(entry) if entry.verdict.is_perfect() => {}
                        _ => r.synth_not_perfect.push(format!("{tag}: {t:?} gave {block:?}")),
                    }
                }
                Err(fails) => r.synth_not_perfect.push(format!("{tag}: {t:?}: {}", fails[0].failure)),
            }
        }

        let mut powers = HashMap::new();
        let b2 = BratteliDiagram::stationary(f.checked_pow(2).unwrap(), 3).unwrap();
        let b5 = BratteliDiagram::stationary(f.clone(), 5).unwrap();
        for entry in &census.entries {
            let block = &entry.words[0];
            if let Some(n) = &entry.necessity {
                if !n.balance_holds {
                    r.unbalanced.push(format!("{tag}: {block:?}"));
                }
            }
            let built = constructible(f, block, &mut powers);
            r.constructible += built as usize;
            if built != entry.verdict.is_perfect() {
                r.verdict_mismatch.push(format!("{tag}: {block:?} census {:?}, constructible {built}", entry.verdict.status));
            }
            let squared = telescoped_block(block, 2);
            let after = stationary_verdict(&b2, &squared);
            if after.status != entry.verdict.status || after.bijection != entry.verdict.bijection {
                r.telescope_mismatch.push(format!("{tag}: {block:?}"));
            }
            if sample.gen_ratio(1, 50) {
                r.telescope_sampled += 1;
                let omega = DiagramOrder::stationary(&b5, block).unwrap();
                let t = telescope(&b5, &[0, 1, 3, 5]).unwrap();
                let lo = telescope_order(&b5, &omega, &t).unwrap();
                let real = check_perfect_finite_rank(&t.diagram, &lo, 3).unwrap();
                if lo.source_words(2) != squared || real.status != entry.verdict.status {
                    r.telescope_mismatch.push(format!("{tag}: transported order disagrees for {block:?}"));
                }
            }
        }
    }
    r.elapsed = start.elapsed();
    r
}

fn first(v: &[String]) -> String {
    v.first().cloned().unwrap_or_default()
}

fn criterion_6(c: &CorpusResult) -> Check {
    ensure(c.instances >= 50, "corpus too small")?;
    ensure(c.synth_not_perfect.is_empty(), format!("{} synthesized orders not perfect: {}", c.synth_not_perfect.len(), first(&c.synth_not_perfect)))?;
    ensure(c.verdict_mismatch.is_empty(), format!("{} orders disagree: {}", c.verdict_mismatch.len(), first(&c.verdict_mismatch)))?;
    ensure(c.elapsed < Duration::from_secs(300), format!("took {:?}", c.elapsed))?;
    Ok(format!(
        "{} instances, {} orders, {} perfect = {} constructible, {} synthesized orders all perfect, {:?}",
        c.instances, c.orders, c.perfect, c.constructible, c.synthesized, c.elapsed
    ))
}

fn criterion_7(c: &CorpusResult) -> Check {
    ensure(c.unbalanced.is_empty(), format!("{} counterexamples: {}", c.unbalanced.len(), first(&c.unbalanced)))?;
    Ok(format!("{} perfect orders, 0 counterexamples", c.perfect))
}

fn criterion_8(c: &CorpusResult) -> Check {
    ensure(c.telescope_mismatch.is_empty(), format!("{} mismatches: {}", c.telescope_mismatch.len(), first(&c.telescope_mismatch)))?;
    Ok(format!("{} orders, 0 mismatches ({} transported explicitly)", c.orders, c.telescope_sampled))
}

fn criterion_9(c: &CorpusResult, fixture_runs: usize) -> Check {
    ensure(c.eulerian_failures.is_empty(), format!("{} failures: {}", c.eulerian_failures.len(), first(&c.eulerian_failures)))?;
    ensure(c.runs + fixture_runs > 0, "no synthesis runs")?;
    Ok(format!("{} walks checked", c.runs + fixture_runs))
}

fn criterion_10() -> Check {
    let cases = [
        ("example_2_6", fixtures::example_2_6_skeleton(4)),
        ("example_4_4", fixtures::example_4_4(4)),
        ("example_5_2", fixtures::example_5_2(4)),
        ("example_5_3", fixtures::example_5_3(4)),
    ];
    let mut worst: f64 = 0.0;
    for (name, fx) in cases {
        let start = Instant::now();
        let fam = epsilon_family(&fx.diagram, &fx.skeleton, &fx.sigma, 2, 1).map_err(e)?;
        for v in &fam {
            let p = perron_pairing_check(&fx.diagram, &v.entries).map_err(e)?;
            ensure(p.pass, format!("{name}: pairing {} residual {}", p.pairing, p.residual))?;
            worst = worst.max(p.pairing.abs());
        }
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_millis(100), format!("{name} took {elapsed:?}"))?;
    }
    Ok(format!("4 fixtures, max |<p,eps>| = {worst:.1e}"))
}

fn criterion_11() -> Check {
    let cases = [
        (fixtures::obstruction_k3(6), ObstructionVerdict::NoPerfectOrder, "k=3 d=2"),
        (fixtures::obstruction_k2_c2(6), ObstructionVerdict::NoPerfectOrder, "k=2 C=(2)"),
        (fixtures::obstruction_k2_c1(6), ObstructionVerdict::NotBlocked, "k=2 C=(1)"),
    ];
    for (b, want, name) in cases {
        let r = class_a_obstruction(&b, 6);
        ensure(r.verdict == want, format!("{name}: {:?} ({})", r.verdict, r.reason))?;
    }
    Ok("NO_PERFECT_ORDER, NO_PERFECT_ORDER, NOT_BLOCKED".into())
}

fn main() {
    let mut fixture_runs = 0;
    let mut results: Vec<(usize, &str, Check)> = vec![
        (1, "Example 2.6 order is perfect", criterion_1()),
        (2, "Example 4.6 word", criterion_2(&mut fixture_runs)),
        (3, "Example 4.8 word", criterion_3(&mut fixture_runs)),
        (4, "Example 4.4 refusal", criterion_4()),
        (5, "Examples 5.2 and 5.3 vectors", criterion_5()),
    ];
    let corpus = run_corpus();
    results.push((6, "census agrees with synthesis", criterion_6(&corpus)));
    results.push((7, "perfect orders are balanced", criterion_7(&corpus)));
    results.push((8, "verdicts survive telescoping", criterion_8(&corpus)));
    results.push((9, "walks are Eulerian", criterion_9(&corpus, fixture_runs)));
    results.push((10, "Perron pairing vanishes", criterion_10()));
    results.push((11, "class-A obstruction", criterion_11()));
    let mut failed = 0;
    for (i, name, r) in &results {
        match r {
            Ok(detail) => println!("PASS {i:>2} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {i:>2} {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Perfectness checks: language against the cell graph, the finite-rank
//! pairing criterion, exhaustive order censuses and the class-A obstruction.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diagram::{classify, BratteliDiagram, Count, IncidenceMatrix};
use crate::error::{Error, Result};
use crate::hgraph::{build_graph, connectivity, crossing_numbers, positively_strong};
use crate::ordering::{level_language, stationary_two_language, DiagramOrder};
use crate::skeleton::{periodic_points, skeleton_from_order, Correspondence, Skeleton};
use crate::synth::{check_balance, solve_decomposition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorWitness {
    pub word: String,
    pub letters: Vec<usize>,
    pub from_cell: String,
    pub to_cell: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordsVerdict {
    pub level: usize,
    pub horizon: usize,
    pub checked_factors: usize,
    pub pass: bool,
    pub witness: Option<FactorWitness>,
}

/// Every two-letter factor `xy` of the level-`n` language must be an edge
/// `cell(x) -> cell(y)` of `H_n`; longer words are walks exactly when all
/// their two-letter factors are.
pub fn check_words_follow_graph(
    b: &BratteliDiagram,
    omega: &DiagramOrder,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
    horizon: usize,
) -> Result<WordsVerdict> {
    let lang = level_language(b, omega, n, horizon, 2)?;
    let pairs = lang.two_letter();
    if n == 0 {
        return Ok(WordsVerdict { level: n, horizon, checked_factors: pairs.len(), pass: true, witness: None });
    }
    let graph = build_graph(b, skeleton, sigma, n)?;
    for &(x, y) in &pairs {
        let (cx, cy) = (graph.partition.cell_of[x], graph.partition.cell_of[y]);
        if !graph.has_edge(cx, cy) {
            return Ok(WordsVerdict {
                level: n,
                horizon,
                checked_factors: pairs.len(),
                pass: false,
                witness: Some(FactorWitness {
                    word: b.word_string(n, &[x, y]),
                    letters: vec![x, y],
                    from_cell: graph.cell_labels[cx].clone(),
                    to_cell: graph.cell_labels[cy].clone(),
                }),
            });
        }
    }
    Ok(WordsVerdict { level: n, horizon, checked_factors: pairs.len(), pass: true, witness: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictStatus {
    PerfectUpToDepth,
    NotPerfect,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictWitness {
    CardinalityMismatch { k: usize, k_prime: usize },
    /// Two pairs of the relation sharing a coordinate.
    Ambiguous { level: usize, words: Vec<String>, pairs: Vec<(usize, usize)> },
    Unpaired { level: usize, vertex: String, side: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerfectVerdict {
    pub status: VerdictStatus,
    pub horizon: usize,
    pub k: Option<usize>,
    pub k_prime: Option<usize>,
    /// Pairs `(maximal vertex, minimal vertex)` at the checked level.
    pub bijection: Option<Vec<(usize, usize)>>,
    pub bijection_labels: Option<Vec<(String, String)>>,
    pub witness: Option<VerdictWitness>,
    pub reason: Option<String>,
    /// Stationary diagram with a stationary order: one level decides all.
    pub stationary_certificate: bool,
    pub telescoped_levels: Vec<usize>,
}

impl PerfectVerdict {
    fn blank(horizon: usize) -> Self {
        PerfectVerdict {
            status: VerdictStatus::Inconclusive,
            horizon,
            k: None,
            k_prime: None,
            bijection: None,
            bijection_labels: None,
            witness: None,
            reason: None,
            stationary_certificate: false,
            telescoped_levels: Vec::new(),
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.status == VerdictStatus::PerfectUpToDepth
    }
}

enum Pairing {
    Bijection(Vec<(usize, usize)>),
    Ambiguous((usize, usize), (usize, usize)),
    Unpaired(usize, bool),
}

fn pairing(rel: &BTreeSet<(usize, usize)>, maxv: &BTreeSet<usize>, minv: &BTreeSet<usize>) -> Pairing {
    let mut by_max: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut by_min: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(x, y) in rel {
        by_max.entry(x).or_default().push(y);
        by_min.entry(y).or_default().push(x);
    }
    for (&x, ys) in &by_max {
        if ys.len() > 1 {
            return Pairing::Ambiguous((x, ys[0]), (x, ys[1]));
        }
    }
    for (&y, xs) in &by_min {
        if xs.len() > 1 {
            return Pairing::Ambiguous((xs[0], y), (xs[1], y));
        }
    }
    if let Some(&x) = maxv.iter().find(|x| !by_max.contains_key(x)) {
        return Pairing::Unpaired(x, true);
    }
    if let Some(&y) = minv.iter().find(|y| !by_min.contains_key(y)) {
        return Pairing::Unpaired(y, false);
    }
    Pairing::Bijection(rel.iter().copied().collect())
}

fn labelled(b: &BratteliDiagram, level: usize, pairs: &[(usize, usize)]) -> Vec<(String, String)> {
    pairs.iter().map(|&(x, y)| (b.label(level, x), b.label(level, y))).collect()
}

/// Verdict for a stationary order given by its block source words.
pub fn stationary_verdict(b: &BratteliDiagram, block: &[Vec<usize>]) -> PerfectVerdict {
    let mut v = PerfectVerdict::blank(b.depth());
    v.stationary_certificate = true;
    let tau: Vec<usize> = block.iter().map(|w| *w.last().unwrap()).collect();
    let mu: Vec<usize> = block.iter().map(|w| w[0]).collect();
    let per_t = periodic_points(&tau);
    let per_m = periodic_points(&mu);
    v.k = Some(per_t.len());
    v.k_prime = Some(per_m.len());
    if per_t.len() != per_m.len() {
        v.status = VerdictStatus::NotPerfect;
        v.witness = Some(VerdictWitness::CardinalityMismatch { k: per_t.len(), k_prime: per_m.len() });
        return v;
    }
    let rel: BTreeSet<(usize, usize)> = stationary_two_language(block)
        .into_iter()
        .filter(|(x, y)| per_t.contains(x) && per_m.contains(y))
        .collect();
    let level = 1.min(b.depth());
    apply_pairing(&mut v, b, level, pairing(&rel, &per_t, &per_m), true);
    v
}

fn apply_pairing(v: &mut PerfectVerdict, b: &BratteliDiagram, level: usize, p: Pairing, definitive: bool) {
    match p {
        Pairing::Bijection(pairs) => {
            v.status = VerdictStatus::PerfectUpToDepth;
            v.bijection_labels = Some(labelled(b, level, &pairs));
            v.bijection = Some(pairs);
        }
        Pairing::Ambiguous(p, q) => {
            v.status = VerdictStatus::NotPerfect;
            v.witness = Some(VerdictWitness::Ambiguous {
                level,
                words: vec![b.word_string(level, &[p.0, p.1]), b.word_string(level, &[q.0, q.1])],
                pairs: vec![p, q],
            });
        }
        Pairing::Unpaired(x, max_side) => {
            v.status = if definitive { VerdictStatus::NotPerfect } else { VerdictStatus::Inconclusive };
            let side = if max_side { "maximal" } else { "minimal" };
            v.witness = Some(VerdictWitness::Unpaired { level, vertex: b.label(level, x), side: side.into() });
            if !definitive {
                v.reason = Some(format!("{side} vertex {} has no partner up to the horizon", b.label(level, x)));
            }
        }
    }
}

/// Pairing criterion for finite rank: `k` maximal and `k'` minimal paths,
/// perfect iff `k = k'` and the two-letter words from maximal to minimal
/// vertices form the graph of a bijection.
pub fn check_perfect_finite_rank(b: &BratteliDiagram, omega: &DiagramOrder, horizon: usize) -> Result<PerfectVerdict> {
    if omega.depth() != b.depth() {
        return Err(Error::InvalidOrder("order and diagram depths differ".into()));
    }
    if b.is_stationary() && b.depth() >= 2 && omega.is_stationary_from(2) {
        return Ok(stationary_verdict(b, &omega.source_words(2)));
    }
    let h = horizon.min(b.depth());
    if h < 2 {
        let mut v = PerfectVerdict::blank(h);
        v.reason = Some("depth below 2".into());
        return Ok(v);
    }
    let (bt, ot) = if h < b.depth() { (b.truncate(h)?, omega.truncate(h)) } else { (b.clone(), omega.clone()) };
    let mut v = PerfectVerdict::blank(h);
    let ext = match skeleton_from_order(&bt, &ot) {
        Ok(e) => e,
        Err(e) => {
            v.reason = Some(format!("telescoping: {e}"));
            return Ok(v);
        }
    };
    v.telescoped_levels = ext.levels.clone();
    let nb = &ext.diagram;
    let top = nb.depth();
    let c = top - 1;
    if c == 0 {
        v.reason = Some("telescoped diagram too shallow".into());
        return Ok(v);
    }
    for t in 2..=c {
        for (kind, set_t, set_p, step) in [
            ("maximal", ext.skeleton.max_vertices(t), ext.skeleton.max_vertices(t - 1), true),
            ("minimal", ext.skeleton.min_vertices(t), ext.skeleton.min_vertices(t - 1), false),
        ] {
            let img: BTreeSet<usize> = set_t
                .iter()
                .map(|&x| if step { ext.skeleton.tau(t, x) } else { ext.skeleton.mu(t, x) })
                .collect();
            if img.len() != set_t.len() || img != set_p {
                v.reason = Some(format!(
                    "{kind} paths are not vertical between telescoped levels {} and {t}",
                    t - 1
                ));
                return Ok(v);
            }
        }
    }
    let maxc = ext.skeleton.max_vertices(c);
    let minc = ext.skeleton.min_vertices(c);
    v.k = Some(maxc.len());
    v.k_prime = Some(minc.len());
    if maxc.len() != minc.len() {
        v.status = VerdictStatus::NotPerfect;
        v.witness = Some(VerdictWitness::CardinalityMismatch { k: maxc.len(), k_prime: minc.len() });
        return Ok(v);
    }
    let mut last = None;
    for n in 1..=c {
        let lang = level_language(nb, &ext.order, n, top, 2)?;
        let maxv = ext.skeleton.max_vertices(n);
        let minv = ext.skeleton.min_vertices(n);
        let rel: BTreeSet<(usize, usize)> = lang
            .two_letter()
            .into_iter()
            .filter(|(x, y)| maxv.contains(x) && minv.contains(y))
            .collect();
        let p = pairing(&rel, &maxv, &minv);
        match p {
            Pairing::Bijection(_) => last = Some((n, p)),
            _ => {
                apply_pairing(&mut v, nb, n, p, false);
                return Ok(v);
            }
        }
    }
    let (n, p) = last.unwrap();
    apply_pairing(&mut v, nb, n, p, false);
    Ok(v)
}

/// Source words of the `p`-fold telescoped stationary order.
pub fn telescoped_block(block: &[Vec<usize>], p: usize) -> Vec<Vec<usize>> {
    let mut cur = block.to_vec();
    for _ in 1..p {
        cur = block.iter().map(|w| w.iter().flat_map(|&x| cur[x].iter().copied()).collect()).collect();
    }
    cur
}

fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

fn is_idempotent(f: &[usize]) -> bool {
    (0..f.len()).all(|x| f[f[x]] == f[x])
}

/// Smallest `p >= 1` with `f^p` idempotent.
pub fn idempotent_power(f: &[usize]) -> usize {
    let mut g = f.to_vec();
    let mut p = 1;
    while !is_idempotent(&g) {
        g = compose(f, &g);
        p += 1;
    }
    p
}

/// Maximal sources, minimal sources and the pairing of a stationary order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StationaryTriple {
    pub tau: Vec<usize>,
    pub mu: Vec<usize>,
    pub sigma: Vec<(usize, usize)>,
}

impl StationaryTriple {
    pub fn skeleton(&self, b: &BratteliDiagram) -> Result<Skeleton> {
        Skeleton::stationary(b, &self.tau, &self.mu)
    }

    pub fn correspondence(&self, depth: usize) -> Correspondence {
        Correspondence::from_point_map(&self.sigma, depth)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TargetNecessity {
    pub target: usize,
    pub balanced: bool,
    pub positively_strong: bool,
    pub witness: Option<String>,
}

/// Theorem-style conditions evaluated on a perfect stationary order, after
/// telescoping until its extremal sources are idempotent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NecessityReport {
    pub power: usize,
    pub triple: StationaryTriple,
    pub words_follow_graph: bool,
    pub strongly_connected: bool,
    pub balance_holds: bool,
    pub positively_strong_all: bool,
    pub targets: Vec<TargetNecessity>,
}

/// Conditions for a stationary triple on the diagram with block `f`.
pub fn triple_conditions(f: &IncidenceMatrix, triple: &StationaryTriple) -> Result<(Vec<TargetNecessity>, bool)> {
    let b = BratteliDiagram::stationary(f.clone(), 3)?;
    let skel = triple.skeleton(&b)?;
    let sigma = triple.correspondence(3);
    let graph = build_graph(&b, &skel, &sigma, 2)?;
    let strong = connectivity(&graph).strong;
    let mut targets = Vec::with_capacity(b.vertex_count(3));
    for u in 0..b.vertex_count(3) {
        let (balanced, mut witness) = match solve_decomposition(&b, &skel, &sigma, 2, u)? {
            Ok(dec) => (check_balance(&b, &skel, &sigma, 2, u, &dec)?.pass(), None),
            Err(inf) => (false, Some(inf.reason)),
        };
        let cross = crossing_numbers(&b, &skel, &graph, u)?;
        let pc = positively_strong(&graph, &cross);
        if let Some((x, y)) = pc.witness {
            witness.get_or_insert_with(|| {
                format!("no path from {} to {}", graph.cell_labels[x], graph.cell_labels[y])
            });
        }
        targets.push(TargetNecessity { target: u, balanced, positively_strong: pc.strongly_connected, witness });
    }
    Ok((targets, strong))
}

/// Telescopes a perfect stationary order to idempotent extremal sources and
/// evaluates the graph, balance and connectivity conditions there.
pub fn necessity_report(f: &IncidenceMatrix, block: &[Vec<usize>], verdict: &PerfectVerdict) -> Result<NecessityReport> {
    let pairs = verdict
        .bijection
        .clone()
        .ok_or_else(|| Error::NotApplicable("order is not certified perfect".into()))?;
    let tau: Vec<usize> = block.iter().map(|w| *w.last().unwrap()).collect();
    let mu: Vec<usize> = block.iter().map(|w| w[0]).collect();
    let mut p = idempotent_power(&tau).max(idempotent_power(&mu));
    while !(is_idempotent(&nth_power(&tau, p)) && is_idempotent(&nth_power(&mu, p))) {
        p += 1;
    }
    let fp = f.checked_pow(p as u32)?;
    let words = telescoped_block(block, p);
    let triple = StationaryTriple { tau: nth_power(&tau, p), mu: nth_power(&mu, p), sigma: pairs };
    let b = BratteliDiagram::stationary(fp.clone(), 4)?;
    let omega = DiagramOrder::stationary(&b, &words)?;
    let skel = triple.skeleton(&b)?;
    let sigma = triple.correspondence(4);
    let follow = check_words_follow_graph(&b, &omega, &skel, &sigma, 2, 4)?.pass;
    let (targets, strong) = triple_conditions(&fp, &triple)?;
    Ok(NecessityReport {
        power: p,
        triple,
        words_follow_graph: follow,
        strongly_connected: strong,
        balance_holds: targets.iter().all(|t| t.balanced),
        positively_strong_all: targets.iter().all(|t| t.positively_strong),
        targets,
    })
}

fn nth_power(f: &[usize], p: usize) -> Vec<usize> {
    let mut g: Vec<usize> = (0..f.len()).collect();
    for _ in 0..p {
        g = compose(f, &g);
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CensusMode {
    /// One block of source words reused at every level from 2 on.
    Stationary,
    /// Independent words at every level of a finite diagram.
    PerLevel,
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub mode: CensusMode,
    pub budget: u128,
    /// Stationary mode only: required first letters of the block words.
    pub fixed_mu: Option<Vec<usize>>,
    /// Stationary mode only: required last letters.
    pub fixed_tau: Option<Vec<usize>>,
    pub necessity: bool,
}

impl CensusOptions {
    pub fn new(mode: CensusMode, budget: u128) -> Self {
        CensusOptions { mode, budget, fixed_mu: None, fixed_tau: None, necessity: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusEntry {
    pub index: usize,
    /// One block in stationary mode, levels `1..=depth` otherwise.
    pub words: Vec<Vec<Vec<usize>>>,
    pub verdict: PerfectVerdict,
    pub necessity: Option<NecessityReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub mode: CensusMode,
    pub count: u128,
    pub perfect: usize,
    pub entries: Vec<CensusEntry>,
}

fn multinomial(counts: &[Count]) -> u128 {
    let mut out: u128 = 1;
    let mut total: u128 = 0;
    for &c in counts {
        for i in 1..=c as u128 {
            total += 1;
            out = out.saturating_mul(total) / i;
        }
    }
    out
}

/// Distinct arrangements of a multiset row, optionally with fixed endpoints,
/// in lexicographic order.
pub fn multiset_words(row: &[Count], first: Option<usize>, last: Option<usize>) -> Vec<Vec<usize>> {
    let mut rest = row.to_vec();
    let total: Count = rest.iter().sum();
    if total == 1 && first.is_some() && last.is_some() {
        let x = first.unwrap();
        return if first == last && rest.get(x) == Some(&1) { vec![vec![x]] } else { Vec::new() };
    }
    for end in [first, last].into_iter().flatten() {
        if end >= rest.len() || rest[end] == 0 {
            return Vec::new();
        }
        rest[end] -= 1;
    }
    let mut mid: Vec<usize> = rest.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize)).collect();
    let mut out = Vec::new();
    loop {
        let mut w = Vec::with_capacity(total as usize);
        w.extend(first);
        w.extend(&mid);
        w.extend(last);
        out.push(w);
        if !next_permutation(&mut mid) {
            break;
        }
    }
    out
}

fn multiset_count(row: &[Count], first: Option<usize>, last: Option<usize>) -> u128 {
    let total: Count = row.iter().sum();
    if total == 1 && first.is_some() && last.is_some() {
        return multiset_words(row, first, last).len() as u128;
    }
    let mut rest = row.to_vec();
    for end in [first, last].into_iter().flatten() {
        if end >= rest.len() || rest[end] == 0 {
            return 0;
        }
        rest[end] -= 1;
    }
    multinomial(&rest)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn level_rows(b: &BratteliDiagram, n: usize) -> Vec<Vec<Count>> {
    b.incidence_matrix(n - 1).unwrap().to_rows()
}

/// Number of orders the census would enumerate (parallel edges are
/// interchangeable, so orders are counted as source words).
pub fn census_size(b: &BratteliDiagram, options: &CensusOptions) -> Result<u128> {
    match options.mode {
        CensusMode::Stationary => {
            let f = b.stationary_block().ok_or_else(|| Error::NotApplicable("diagram is not stationary".into()))?;
            Ok((0..f.rows())
                .map(|v| {
                    let first = options.fixed_mu.as_ref().map(|m| m[v]);
                    let last = options.fixed_tau.as_ref().map(|t| t[v]);
                    multiset_count(f.row(v), first, last)
                })
                .fold(1u128, |a, c| a.saturating_mul(c)))
        }
        CensusMode::PerLevel => {
            let mut total: u128 = 1;
            for n in 1..=b.depth() {
                for row in level_rows(b, n) {
                    total = total.saturating_mul(multiset_count(&row, None, None));
                }
            }
            Ok(total)
        }
    }
}

fn odometer(lists: &[Vec<Vec<usize>>], mut visit: impl FnMut(Vec<Vec<usize>>) -> Result<()>) -> Result<()> {
    if lists.iter().any(|l| l.is_empty()) {
        return Ok(());
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        visit(idx.iter().enumerate().map(|(v, &i)| lists[v][i].clone()).collect())?;
        let mut pos = lists.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Runs the finite-rank verdict on every order. Entries come in
/// lexicographic order of their words.
pub fn brute_force_orders(b: &BratteliDiagram, options: &CensusOptions) -> Result<Census> {
    let count = census_size(b, options)?;
    if count > options.budget {
        return Err(Error::TooLarge(format!("census needs {count} orders, budget is {}", options.budget)));
    }
    let mut entries = Vec::new();
    match options.mode {
        CensusMode::Stationary => {
            let f = b.stationary_block().unwrap().clone();
            let lists: Vec<Vec<Vec<usize>>> = (0..f.rows())
                .map(|v| {
                    multiset_words(
                        f.row(v),
                        options.fixed_mu.as_ref().map(|m| m[v]),
                        options.fixed_tau.as_ref().map(|t| t[v]),
                    )
                })
                .collect();
            let view = if b.depth() >= 2 { b.clone() } else { b.extend_to(2)? };
            odometer(&lists, |block| {
                let verdict = stationary_verdict(&view, &block);
                let necessity = if options.necessity && verdict.is_perfect() {
                    Some(necessity_report(&f, &block, &verdict)?)
                } else {
                    None
                };
                entries.push(CensusEntry { index: entries.len(), words: vec![block], verdict, necessity });
                Ok(())
            })?;
        }
        CensusMode::PerLevel => {
            let mut lists = Vec::new();
            let mut shape = Vec::new();
            for n in 1..=b.depth() {
                let rows = level_rows(b, n);
                shape.push(rows.len());
                for row in rows {
                    lists.push(multiset_words(&row, None, None));
                }
            }
            odometer(&lists, |flat| {
                let mut words = Vec::with_capacity(shape.len());
                let mut it = flat.into_iter();
                for &len in &shape {
                    words.push(it.by_ref().take(len).collect::<Vec<_>>());
                }
                let omega = DiagramOrder::from_source_words(b, &words)?;
                let verdict = check_perfect_finite_rank(b, &omega, b.depth())?;
                entries.push(CensusEntry { index: entries.len(), words, verdict, necessity: None });
                Ok(())
            })?;
        }
    }
    let perfect = entries.iter().filter(|e| e.verdict.is_perfect()).count();
    Ok(Census { mode: options.mode, count, perfect, entries })
}

fn idempotents(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut f = vec![0usize; d];
    loop {
        if is_idempotent(&f) {
            out.push(f.clone());
        }
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            f[i] += 1;
            if f[i] < d {
                break;
            }
            f[i] = 0;
            i += 1;
        }
    }
}

fn bijections(from: &[usize], to: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let mut perm: Vec<usize> = (0..to.len()).collect();
    let mut out = Vec::new();
    loop {
        out.push(from.iter().zip(&perm).map(|(&x, &j)| (x, to[j])).collect());
        if !next_permutation(&mut perm) {
            return out;
        }
    }
}

/// A stationary triple together with its condition report.
#[derive(Clone, Debug, Serialize)]
pub struct TripleReport {
    pub triple: StationaryTriple,
    pub strongly_connected: bool,
    pub targets: Vec<TargetNecessity>,
}

impl TripleReport {
    pub fn balance_holds(&self) -> bool {
        self.targets.iter().all(|t| t.balanced)
    }

    pub fn positively_strong(&self) -> bool {
        self.targets.iter().all(|t| t.positively_strong)
    }

    /// Every hypothesis of the synthesis theorem holds.
    pub fn synthesizable(&self) -> bool {
        self.balance_holds() && self.positively_strong()
    }
}

/// All triples with idempotent extremal sources that give a valid stationary
/// skeleton with a bijective correspondence, with their conditions.
pub fn stationary_triples(f: &IncidenceMatrix) -> Result<Vec<TripleReport>> {
    let d = f.rows();
    if f.cols() != d {
        return Err(Error::Dimension("block must be square".into()));
    }
    let b = BratteliDiagram::stationary(f.clone(), 3)?;
    let ids = idempotents(d);
    let usable = |t: &[usize]| (0..d).all(|v| f.get(v, t[v]) > 0);
    let mut out = Vec::new();
    for tau in ids.iter().filter(|t| usable(t)) {
        let fix_t: Vec<usize> = (0..d).filter(|&x| tau[x] == x).collect();
        for mu in ids.iter().filter(|m| usable(m)) {
            let fix_m: Vec<usize> = (0..d).filter(|&x| mu[x] == x).collect();
            if fix_t.len() != fix_m.len() {
                continue;
            }
            if Skeleton::stationary(&b, tau, mu).is_err() {
                continue;
            }
            for sigma in bijections(&fix_t, &fix_m) {
                let triple = StationaryTriple { tau: tau.clone(), mu: mu.clone(), sigma };
                let (targets, strong) = triple_conditions(f, &triple)?;
                out.push(TripleReport { triple, strongly_connected: strong, targets });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ObstructionVerdict {
    NoPerfectOrder,
    NotBlocked,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub verdict: ObstructionVerdict,
    pub checked_depth: usize,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub reason: String,
}

/// Class-A diagrams with `k` minimal components and a `d x d` remainder,
/// `d <= k-1`: no perfect order when `k >= 3`; for `k = 2` only a remainder
/// eventually equal to `(1)` escapes.
pub fn class_a_obstruction(b: &BratteliDiagram, check_depth: usize) -> ObstructionReport {
    let class = classify(b, check_depth);
    let na = |reason: String, k, d| ObstructionReport {
        verdict: ObstructionVerdict::NotApplicable,
        checked_depth: class.checked_depth,
        k,
        d,
        reason,
    };
    let Some(ca) = class.class_a.as_ref() else {
        return na("diagram is not in class A up to the checked depth".into(), None, None);
    };
    let k = ca.k;
    let d = ca.levels.iter().map(|l| l.rest_rows.len()).max().unwrap_or(0);
    if k < 2 {
        return na(format!("{k} minimal component"), Some(k), Some(d));
    }
    if d == 0 || d > k - 1 {
        return na(format!("remainder size {d} not in 1..={}", k - 1), Some(k), Some(d));
    }
    let report = |verdict, reason: String| ObstructionReport {
        verdict,
        checked_depth: class.checked_depth,
        k: Some(k),
        d: Some(d),
        reason,
    };
    if k >= 3 {
        return report(ObstructionVerdict::NoPerfectOrder, format!("k = {k} minimal components, remainder {d}x{d}"));
    }
    let tail = &ca.levels[ca.levels.len() / 2..];
    if tail.iter().all(|l| l.c_block == vec![vec![1]]) {
        report(ObstructionVerdict::NotBlocked, "k = 2 and the remainder is (1) on the checked tail".into())
    } else {
        let bad = tail.iter().find(|l| l.c_block != vec![vec![1]]).unwrap();
        report(
            ObstructionVerdict::NoPerfectOrder,
            format!("k = 2 and the remainder at level {} is {:?}", bad.level, bad.c_block),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ones2(depth: usize) -> BratteliDiagram {
        BratteliDiagram::stationary(IncidenceMatrix::from_rows(vec![vec![1, 1], vec![1, 1]]).unwrap(), depth)
            .unwrap()
            .with_uniform_labels(&["a", "b"])
            .unwrap()
    }

    #[test]
    fn example_2_6_is_perfect() {
        let (b, omega) = fixtures::example_2_6_telescoped(4);
        let v = check_perfect_finite_rank(&b, &omega, 4).unwrap();
        assert_eq!(v.status, VerdictStatus::PerfectUpToDepth);
        assert_eq!(v.k, Some(3));
        assert_eq!(v.bijection, Some(vec![(0, 1), (1, 2), (2, 0)]));
    }

    #[test]
    fn example_2_6_general_route_agrees() {
        let (b, omega) = fixtures::example_2_6_telescoped(4);
        // same order, but seen as a non-stationary diagram
        let plain = BratteliDiagram::from_matrices(b.matrices().to_vec()).unwrap();
        let o = DiagramOrder::new(&plain, omega.levels().to_vec()).unwrap();
        let v = check_perfect_finite_rank(&plain, &o, 4).unwrap();
        assert_eq!(v.status, VerdictStatus::PerfectUpToDepth);
        assert_eq!(v.bijection, Some(vec![(0, 1), (1, 2), (2, 0)]));
        assert!(!v.stationary_certificate);
    }

    #[test]
    fn words_follow_graph_and_witness() {
        let fx = fixtures::example_2_6_skeleton(4);
        let (b, omega) = fixtures::example_2_6_telescoped(4);
        for n in 1..4 {
            assert!(check_words_follow_graph(&b, &omega, &fx.skeleton, &fx.sigma, n, 4).unwrap().pass);
        }
        let bad = Correspondence::from_point_map(&[(0, 2), (1, 2), (2, 0)], 4);
        let v = check_words_follow_graph(&b, &omega, &fx.skeleton, &bad, 2, 4).unwrap();
        assert!(!v.pass);
        assert_eq!(v.witness.unwrap().word, "ab");
    }

    #[test]
    fn two_by_two_census() {
        let b = ones2(3);
        let c = brute_force_orders(&b, &CensusOptions::new(CensusMode::Stationary, 100)).unwrap();
        assert_eq!(c.count, 4);
        let perfect: Vec<_> = c.entries.iter().filter(|e| e.verdict.is_perfect()).map(|e| e.words[0].clone()).collect();
        assert_eq!(perfect, vec![vec![vec![0, 1], vec![0, 1]], vec![vec![1, 0], vec![1, 0]]]);
        for e in c.entries.iter().filter(|e| e.verdict.is_perfect()) {
            let nec = e.necessity.as_ref().unwrap();
            assert!(nec.balance_holds && nec.words_follow_graph);
        }
    }

    #[test]
    fn mixed_two_by_two_order() {
        let b = ones2(3);
        let v = stationary_verdict(&b, &[vec![0, 1], vec![1, 0]]);
        assert_eq!(v.status, VerdictStatus::NotPerfect);
        assert_eq!((v.k, v.k_prime), (Some(2), Some(2)));
        assert!(matches!(v.witness, Some(VerdictWitness::Ambiguous { .. })));
        let v = stationary_verdict(&b, &[vec![1, 0], vec![0, 1]]);
        assert_eq!(v.status, VerdictStatus::NotPerfect);
    }

    #[test]
    fn zero_budget_reports_count() {
        let b = ones2(3);
        let err = brute_force_orders(&b, &CensusOptions::new(CensusMode::Stationary, 0)).unwrap_err();
        assert!(err.to_string().contains("needs 4 orders"));
    }

    #[test]
    fn example_4_4_has_no_order() {
        let b = fixtures::example_2_6_diagram(3);
        let mut opts = CensusOptions::new(CensusMode::Stationary, 10_000);
        opts.fixed_tau = Some(vec![0, 1, 2, 0]);
        opts.fixed_mu = Some(vec![0, 1, 2, 1]);
        let c = brute_force_orders(&b, &opts).unwrap();
        assert_eq!(c.count, 648);
        let cyclic = vec![(0, 1), (1, 2), (2, 0)];
        assert!(c.entries.iter().all(|e| e.verdict.bijection.as_ref() != Some(&cyclic)));
    }

    #[test]
    fn multiset_enumeration() {
        assert_eq!(multiset_words(&[1, 1], None, None), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(multiset_words(&[2, 1], Some(0), None), vec![vec![0, 0, 1], vec![0, 1, 0]]);
        assert_eq!(multiset_words(&[1], Some(0), Some(0)), vec![vec![0]]);
        assert_eq!(multiset_count(&[2, 1, 1, 1], None, None), 60);
        assert_eq!(multiset_words(&[2, 1, 1, 1], None, None).len(), 60);
    }

    #[test]
    fn obstruction_fixtures() {
        assert_eq!(class_a_obstruction(&fixtures::obstruction_k3(4), 6).verdict, ObstructionVerdict::NoPerfectOrder);
        assert_eq!(class_a_obstruction(&fixtures::obstruction_k2_c2(4), 6).verdict, ObstructionVerdict::NoPerfectOrder);
        assert_eq!(class_a_obstruction(&fixtures::obstruction_k2_c1(4), 6).verdict, ObstructionVerdict::NotBlocked);
        assert_eq!(
            class_a_obstruction(&fixtures::example_2_6_diagram(4), 6).verdict,
            ObstructionVerdict::NotApplicable
        );
    }

    #[test]
    fn telescoped_block_words() {
        let block = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(telescoped_block(&block, 2), vec![vec![0, 1, 1, 0], vec![1, 0, 0, 1]]);
        assert_eq!(idempotent_power(&[1, 0]), 2);
        assert_eq!(idempotent_power(&[0, 0]), 1);
    }
}

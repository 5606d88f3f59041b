//! Modified matrices, balance relations and the walk that builds an order of
//! `r^{-1}(u)` from a skeleton, a correspondence and a decomposition.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{BratteliDiagram, Count, EdgeId, IncidenceMatrix};
use crate::error::Error;
use crate::flow::FlowNetwork;
use crate::hgraph::{build_graph, crossing_numbers, positively_strong, AssociatedGraph, Crossing, PositiveConnectivity};
use crate::ordering::DiagramOrder;
use crate::skeleton::{Correspondence, Skeleton};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModifiedMatrices {
    /// `F_level`, rows indexed by `V_{level+1}`.
    pub level: usize,
    pub tilde: IncidenceMatrix,
    pub bar: IncidenceMatrix,
}

/// Subtract one at the source of the maximal (minimal) edge of every row of `F_n`.
pub fn modified_matrices(b: &BratteliDiagram, skeleton: &Skeleton, n: usize) -> Result<ModifiedMatrices, Error> {
    if n + 1 > skeleton.depth() {
        return Err(Error::InvalidSkeleton(format!("no extremal edges at level {}", n + 1)));
    }
    let f = b.incidence_matrix(n)?;
    let mut tilde = f.clone();
    let mut bar = f.clone();
    for u in 0..f.rows() {
        let t = skeleton.tau(n + 1, u);
        let m = skeleton.mu(n + 1, u);
        tilde.set(u, t, tilde.get(u, t) - 1);
        bar.set(u, m, bar.get(u, m) - 1);
    }
    Ok(ModifiedMatrices { level: n, tilde, bar })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecompositionEntry {
    /// `w` in `V_n`.
    pub vertex: usize,
    /// `v̄` in `σ_{n-1}(s(ẽ_w))`.
    pub min_vertex: usize,
    pub amount: Count,
}

/// The numbers `f̃_{u,w,v̄}` for cells at level `level` and a target `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceDecomposition {
    pub level: usize,
    pub target: usize,
    pub entries: Vec<DecompositionEntry>,
}

impl BalanceDecomposition {
    pub fn new(level: usize, target: usize, entries: &[(usize, usize, Count)]) -> Self {
        let mut entries: Vec<DecompositionEntry> = entries
            .iter()
            .map(|&(vertex, min_vertex, amount)| DecompositionEntry { vertex, min_vertex, amount })
            .collect();
        entries.sort();
        BalanceDecomposition { level, target, entries }
    }

    pub fn get(&self, w: usize, bv: usize) -> Count {
        self.entries
            .iter()
            .filter(|e| e.vertex == w && e.min_vertex == bv)
            .map(|e| e.amount)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowViolation {
    pub vertex: usize,
    pub expected: Count,
    pub found: Count,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceViolation {
    pub min_vertex: usize,
    pub crossing_side: Count,
    pub minimal_side: Count,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceReport {
    pub level: usize,
    pub target: usize,
    pub shape_errors: Vec<String>,
    pub row_violations: Vec<RowViolation>,
    pub balance_violations: Vec<BalanceViolation>,
}

impl BalanceReport {
    pub fn pass(&self) -> bool {
        self.shape_errors.is_empty() && self.row_violations.is_empty() && self.balance_violations.is_empty()
    }
}

/// Row data needed for one target `u` in `V_{n+1}` with cells at level `n`.
struct Target {
    row: Vec<Count>,
    tilde: Vec<Count>,
    bar: Vec<Count>,
    tau: Vec<usize>,
    mu: Vec<usize>,
    tau_u: usize,
    mu_u: usize,
    prev_count: usize,
    min_prev: BTreeSet<usize>,
    sigma: Vec<BTreeSet<usize>>,
}

impl Target {
    fn new(b: &BratteliDiagram, skeleton: &Skeleton, sigma: &Correspondence, n: usize, u: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidLevels("cells live at levels 1 and above".into()));
        }
        if n + 1 > skeleton.depth() || n + 1 > b.depth() {
            return Err(Error::InvalidSkeleton(format!("no extremal edges at level {}", n + 1)));
        }
        if n - 1 > sigma.depth() {
            return Err(Error::InvalidCorrespondence(format!("sigma_{} missing", n - 1)));
        }
        b.check_vertex(n + 1, u)?;
        let mm = modified_matrices(b, skeleton, n)?;
        let k = b.vertex_count(n);
        let prev_count = b.vertex_count(n - 1);
        Ok(Target {
            row: b.incidence_matrix(n)?.row(u).to_vec(),
            tilde: mm.tilde.row(u).to_vec(),
            bar: mm.bar.row(u).to_vec(),
            tau: (0..k).map(|w| skeleton.tau(n, w)).collect(),
            mu: (0..k).map(|w| skeleton.mu(n, w)).collect(),
            tau_u: skeleton.tau(n + 1, u),
            mu_u: skeleton.mu(n + 1, u),
            prev_count,
            min_prev: skeleton.min_vertices(n - 1),
            sigma: (0..prev_count).map(|x| sigma.sigma(n - 1, x)).collect(),
        })
    }

    fn allowed(&self, w: usize, bv: usize) -> bool {
        self.sigma[self.tau[w]].contains(&bv)
    }

    fn demand(&self, bv: usize) -> Count {
        (0..self.row.len()).filter(|&w| self.mu[w] == bv).map(|w| self.bar[w]).sum()
    }
}

pub fn check_balance(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
    u: usize,
    decomposition: &BalanceDecomposition,
) -> Result<BalanceReport, Error> {
    let t = Target::new(b, skeleton, sigma, n, u)?;
    let mut shape_errors = Vec::new();
    if decomposition.level != n || decomposition.target != u {
        shape_errors.push(format!(
            "decomposition is for level {} target {}, checked at level {n} target {u}",
            decomposition.level, decomposition.target
        ));
    }
    for e in &decomposition.entries {
        if e.vertex >= t.row.len() || e.min_vertex >= t.prev_count {
            shape_errors.push(format!("entry ({}, {}) out of range", e.vertex, e.min_vertex));
        } else if !t.allowed(e.vertex, e.min_vertex) && e.amount > 0 {
            shape_errors.push(format!(
                "entry ({}, {}) is not allowed by the correspondence",
                e.vertex, e.min_vertex
            ));
        }
    }
    let mut row_violations = Vec::new();
    for w in 0..t.row.len() {
        let found: Count = decomposition.entries.iter().filter(|e| e.vertex == w).map(|e| e.amount).sum();
        if found != t.tilde[w] {
            row_violations.push(RowViolation { vertex: w, expected: t.tilde[w], found });
        }
    }
    let mut balance_violations = Vec::new();
    for &bv in &t.min_prev {
        let crossing_side: Count = decomposition
            .entries
            .iter()
            .filter(|e| e.min_vertex == bv && e.vertex < t.row.len() && t.allowed(e.vertex, bv))
            .map(|e| e.amount)
            .sum();
        let minimal_side = t.demand(bv);
        if crossing_side != minimal_side {
            balance_violations.push(BalanceViolation { min_vertex: bv, crossing_side, minimal_side });
        }
    }
    Ok(BalanceReport { level: n, target: u, shape_errors, row_violations, balance_violations })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Infeasible {
    pub level: usize,
    pub target: usize,
    pub supply: Count,
    pub demand: Count,
    pub max_flow: Count,
    pub reason: String,
}

/// Finds nonnegative integers satisfying both relation families by a
/// bipartite flow, or explains why none exist.
pub fn solve_decomposition(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
    u: usize,
) -> Result<Result<BalanceDecomposition, Infeasible>, Error> {
    let t = Target::new(b, skeleton, sigma, n, u)?;
    let k = t.row.len();
    let p = t.prev_count;
    let (src, sink) = (k + p, k + p + 1);
    let mut net = FlowNetwork::new(k + p + 2);
    let supply: Count = t.tilde.iter().sum();
    let demand: Count = t.min_prev.iter().map(|&bv| t.demand(bv)).sum();
    for w in 0..k {
        net.add_arc(src, w, t.tilde[w]);
    }
    let mut arcs = Vec::new();
    for w in 0..k {
        for &bv in &t.sigma[t.tau[w]] {
            if bv < p {
                arcs.push((w, bv, net.add_arc(w, k + bv, Count::MAX / 4)));
            }
        }
    }
    for &bv in &t.min_prev {
        net.add_arc(k + bv, sink, t.demand(bv));
    }
    let flow = net.max_flow(src, sink);
    let infeasible = |reason: String| Infeasible { level: n, target: u, supply, demand, max_flow: flow, reason };
    if supply != demand {
        return Ok(Err(infeasible(format!("total crossings {supply} differ from total minimal entries {demand}"))));
    }
    if flow < supply {
        let side = net.residual_reachable(src);
        let stuck: Vec<usize> = (0..k).filter(|&w| side[w]).collect();
        let hubs: Vec<usize> = (0..p).filter(|&bv| side[k + bv]).collect();
        return Ok(Err(infeasible(format!(
            "vertices {stuck:?} can only reach minimal vertices {hubs:?}, whose demand is too small"
        ))));
    }
    let entries: Vec<(usize, usize, Count)> = arcs.iter().map(|&(w, bv, a)| (w, bv, net.flow(a))).collect();
    Ok(Ok(BalanceDecomposition::new(n, u, &entries)))
}

/// How the walk chooses among admissible successors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum WalkPolicy {
    /// Largest remaining count first, lowest index on ties.
    #[default]
    Greedy,
    /// Same preferences, but a choice that makes completion impossible is skipped.
    Guarded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepKind {
    Start,
    Direct,
    EnterLoop,
    Loop,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub letter: usize,
    pub cell: usize,
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SynthesizedOrder {
    /// Level of the target vertex.
    pub level: usize,
    pub target: usize,
    pub word: Vec<usize>,
    pub edges: Vec<EdgeId>,
    pub trace: Vec<TraceStep>,
    pub cell_visits: Vec<Count>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum SynthFailure {
    Input { message: String },
    Unbalanced { report: BalanceReport },
    Infeasible { detail: Infeasible },
    NotPositivelyStrong { connectivity: PositiveConnectivity, no_path_from: String, to: String },
    Stuck { state: String },
    PostCondition { message: String },
}

impl fmt::Display for SynthFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthFailure::Input { message } => write!(f, "input error: {message}"),
            SynthFailure::Unbalanced { report } => write!(
                f,
                "balance relations fail: {} row and {} balance violations",
                report.row_violations.len(),
                report.balance_violations.len()
            ),
            SynthFailure::Infeasible { detail } => write!(f, "no decomposition: {}", detail.reason),
            SynthFailure::NotPositivelyStrong { no_path_from, to, .. } => {
                write!(f, "not positively strongly connected: no path from {no_path_from} to {to}")
            }
            SynthFailure::Stuck { state } => write!(f, "walk stuck: {state}"),
            SynthFailure::PostCondition { message } => write!(f, "post-condition failed: {message}"),
        }
    }
}

impl From<Error> for SynthFailure {
    fn from(e: Error) -> Self {
        SynthFailure::Input { message: e.to_string() }
    }
}

struct WalkState<'a> {
    t: &'a Target,
    graph: &'a AssociatedGraph,
    rem: Vec<Count>,
    d: Vec<Vec<Count>>,
    total: Count,
}

impl WalkState<'_> {
    fn avail(&self, y: usize) -> Count {
        if y == self.t.tau_u && self.total > 1 {
            self.rem[y].saturating_sub(1)
        } else {
            self.rem[y]
        }
    }

    fn cell(&self, y: usize) -> usize {
        self.graph.partition.cell_of[y]
    }

    fn emit(&mut self, x: Option<usize>, y: usize) {
        if let Some(x) = x {
            self.d[x][self.t.mu[y]] -= 1;
        }
        self.rem[y] -= 1;
        self.total -= 1;
    }

    fn undo(&mut self, x: Option<usize>, y: usize) {
        if let Some(x) = x {
            self.d[x][self.t.mu[y]] += 1;
        }
        self.rem[y] += 1;
        self.total += 1;
    }

    /// Whether the remaining letters can still be arranged, starting after
    /// `x` and ending with the target's maximal source.
    fn completable(&self, x: usize) -> bool {
        let k = self.rem.len();
        let p = self.t.prev_count;
        if self.total == 0 {
            return x == self.t.tau_u && self.d.iter().all(|r| r.iter().all(|&c| c == 0));
        }
        let nodes = k + p;
        let mut out = vec![0i128; nodes];
        let mut inn = vec![0i128; nodes];
        let mut adj = vec![Vec::new(); nodes];
        for w in 0..k {
            for bv in 0..p {
                let c = self.d[w][bv];
                if c > 0 {
                    out[w] += c as i128;
                    inn[k + bv] += c as i128;
                    adj[w].push(k + bv);
                }
            }
            if self.rem[w] > 0 {
                let hub = k + self.t.mu[w];
                out[hub] += self.rem[w] as i128;
                inn[w] += self.rem[w] as i128;
                adj[hub].push(w);
            }
        }
        let end = self.t.tau_u;
        for v in 0..nodes {
            let want = (v == x) as i128 - (v == end) as i128;
            if out[v] - inn[v] != want {
                return false;
            }
        }
        let mut seen = vec![false; nodes];
        seen[x] = true;
        let mut stack = vec![x];
        while let Some(a) = stack.pop() {
            for &b in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        (0..nodes).all(|v| seen[v] || (out[v] == 0 && inn[v] == 0))
    }

    /// Candidate successors of `x` in order of preference.
    fn preferences(&self, x: usize, in_loop: Option<usize>) -> Vec<(usize, StepKind)> {
        let k = self.rem.len();
        let mut prefs = Vec::new();
        if let Some(c) = in_loop {
            let bv = self.graph.partition.cells[c].min_vertex;
            if self.d[x][bv] > 0 {
                for &z in &self.graph.partition.cells[c].members {
                    if self.avail(z) > 0 {
                        prefs.push((z, StepKind::Loop));
                    }
                }
            }
        }
        let cands: Vec<usize> = (0..k).filter(|&y| self.d[x][self.t.mu[y]] > 0 && self.avail(y) > 0).collect();
        let looped: Option<usize> = cands
            .iter()
            .map(|&y| self.cell(y))
            .filter(|&c| self.graph.has_loop(c))
            .min();
        if let Some(c) = looped {
            for &y in &cands {
                if self.cell(y) == c {
                    prefs.push((y, StepKind::EnterLoop));
                }
            }
        }
        let mut direct = cands.clone();
        direct.sort_by_key(|&y| (std::cmp::Reverse(self.avail(y)), y));
        prefs.extend(direct.into_iter().map(|y| (y, StepKind::Direct)));
        prefs
    }

    fn describe(&self, word: &[usize]) -> String {
        format!("word so far {word:?}, remaining letters {:?}, remaining crossings {:?}", self.rem, self.d)
    }
}

fn run_walk(t: &Target, graph: &AssociatedGraph, decomposition: &BalanceDecomposition, policy: WalkPolicy) -> Result<(Vec<usize>, Vec<TraceStep>), SynthFailure> {
    let k = t.row.len();
    let mut d = vec![vec![0; t.prev_count]; k];
    for e in &decomposition.entries {
        d[e.vertex][e.min_vertex] += e.amount;
    }
    let mut st = WalkState { t, graph, rem: t.row.clone(), d, total: t.row.iter().sum() };
    let first = t.mu_u;
    st.emit(None, first);
    let mut word = vec![first];
    let mut trace = vec![TraceStep { letter: first, cell: st.cell(first), kind: StepKind::Start }];
    let mut in_loop: Option<usize> = None;
    while st.total > 0 {
        let x = *word.last().unwrap();
        let prefs = st.preferences(x, in_loop);
        let choice = match policy {
            WalkPolicy::Greedy => prefs.first().copied(),
            WalkPolicy::Guarded => prefs.iter().copied().find(|&(y, _)| {
                st.emit(Some(x), y);
                let ok = st.completable(y);
                st.undo(Some(x), y);
                ok
            }),
        };
        let Some((y, kind)) = choice else {
            return Err(SynthFailure::Stuck { state: st.describe(&word) });
        };
        st.emit(Some(x), y);
        in_loop = match kind {
            StepKind::EnterLoop | StepKind::Loop => Some(st.cell(y)),
            _ => None,
        };
        word.push(y);
        trace.push(TraceStep { letter: y, cell: st.cell(y), kind });
    }
    Ok((word, trace))
}

/// Checks endpoints, letter counts, the successor law and cell visit counts.
fn post_check(t: &Target, graph: &AssociatedGraph, crossing: &Crossing, word: &[usize]) -> Result<Vec<Count>, String> {
    if word.first() != Some(&t.mu_u) || word.last() != Some(&t.tau_u) {
        return Err(format!("word {word:?} has wrong endpoints"));
    }
    let mut counts = vec![0; t.row.len()];
    for &x in word {
        counts[x] += 1;
    }
    if counts != t.row {
        return Err(format!("letter counts {counts:?} differ from row {:?}", t.row));
    }
    for p in word.windows(2) {
        if !t.allowed(p[0], t.mu[p[1]]) {
            return Err(format!("pair {}{} breaks the successor law", p[0], p[1]));
        }
    }
    let mut visits = vec![0; graph.len()];
    for &x in &word[..word.len() - 1] {
        visits[graph.partition.cell_of[x]] += 1;
    }
    if visits != crossing.counts {
        return Err(format!("cell visits {visits:?} differ from crossing numbers {:?}", crossing.counts));
    }
    Ok(visits)
}

/// Assign edges to a word: the first is `ē_u`, the last `ẽ_u`, the rest take
/// the remaining copies in increasing order.
pub fn edges_for_word(b: &BratteliDiagram, skeleton: &Skeleton, level: usize, u: usize, word: &[usize]) -> Result<Vec<EdgeId>, Error> {
    let first = skeleton.min_edge(level, u);
    let last = skeleton.max_edge(level, u);
    if word.len() == 1 {
        return Ok(vec![first]);
    }
    let mut used: BTreeSet<EdgeId> = [first, last].into_iter().collect();
    let mut out = Vec::with_capacity(word.len());
    for (i, &x) in word.iter().enumerate() {
        if i == 0 {
            out.push(first);
        } else if i + 1 == word.len() {
            out.push(last);
        } else {
            let f = b.multiplicity(level, u, x) as usize;
            let e = (0..f)
                .map(|c| EdgeId::new(level, u, x, c))
                .find(|e| !used.contains(e))
                .ok_or_else(|| Error::InvalidOrder(format!("too many letters {x} for vertex {u}")))?;
            used.insert(e);
            out.push(e);
        }
    }
    Ok(out)
}

fn label_cell(graph: &AssociatedGraph, c: usize) -> String {
    graph.cell_labels[c].clone()
}

/// Orders `r^{-1}(u)` for `u` in `V_{n+1}` by a walk on the cells of `H_n`.
pub fn synthesize_vertex_order(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
    u: usize,
    decomposition: &BalanceDecomposition,
    policy: WalkPolicy,
) -> Result<SynthesizedOrder, SynthFailure> {
    let t = Target::new(b, skeleton, sigma, n, u)?;
    let graph = build_graph(b, skeleton, sigma, n)?;
    let crossing = crossing_numbers(b, skeleton, &graph, u)?;
    let report = check_balance(b, skeleton, sigma, n, u, decomposition)?;
    if !report.pass() {
        return Err(SynthFailure::Unbalanced { report });
    }
    let pc = positively_strong(&graph, &crossing);
    if let Some((x, y)) = pc.witness {
        return Err(SynthFailure::NotPositivelyStrong {
            no_path_from: label_cell(&graph, x),
            to: label_cell(&graph, y),
            connectivity: pc,
        });
    }
    let (word, trace) = run_walk(&t, &graph, decomposition, policy)?;
    let cell_visits = post_check(&t, &graph, &crossing, &word).map_err(|message| SynthFailure::PostCondition { message })?;
    let edges = edges_for_word(b, skeleton, n + 1, u, &word)?;
    Ok(SynthesizedOrder { level: n + 1, target: u, word, edges, trace, cell_visits })
}

/// Solves for a decomposition and then walks.
pub fn synthesize_target(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
    u: usize,
    policy: WalkPolicy,
) -> Result<SynthesizedOrder, SynthFailure> {
    let dec = match solve_decomposition(b, skeleton, sigma, n, u)? {
        Ok(d) => d,
        Err(detail) => return Err(SynthFailure::Infeasible { detail }),
    };
    synthesize_vertex_order(b, skeleton, sigma, n, u, &dec, policy)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TargetFailure {
    pub level: usize,
    pub target: usize,
    pub failure: SynthFailure,
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub order: DiagramOrder,
    pub runs: Vec<SynthesizedOrder>,
}

fn root_level(skeleton: &Skeleton, b: &BratteliDiagram) -> Vec<Vec<EdgeId>> {
    (0..b.vertex_count(1))
        .map(|u| {
            let (lo, hi) = (skeleton.min_edge(1, u), skeleton.max_edge(1, u));
            let mut es = vec![lo];
            es.extend(b.incoming(1, u).into_iter().filter(|e| *e != lo && *e != hi));
            if hi != lo {
                es.push(hi);
            }
            es
        })
        .collect()
}

/// An order on the whole diagram, every vertex above level 1 synthesized.
pub fn synthesize_order(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    policy: WalkPolicy,
) -> Result<Synthesis, Vec<TargetFailure>> {
    let input = |e: Error| vec![TargetFailure { level: 0, target: 0, failure: e.into() }];
    if skeleton.depth() < b.depth() {
        return Err(input(Error::InvalidSkeleton("skeleton shorter than the diagram".into())));
    }
    if b.depth() >= 2 && sigma.depth() + 2 < b.depth() {
        return Err(input(Error::InvalidCorrespondence("correspondence shorter than the diagram".into())));
    }
    let mut order = vec![root_level(skeleton, b)];
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for n in 1..b.depth() {
        let mut lv = Vec::new();
        for u in 0..b.vertex_count(n + 1) {
            match synthesize_target(b, skeleton, sigma, n, u, policy) {
                Ok(s) => {
                    lv.push(s.edges.clone());
                    runs.push(s);
                }
                Err(failure) => {
                    failures.push(TargetFailure { level: n + 1, target: u, failure });
                    lv.push(b.incoming(n + 1, u));
                }
            }
        }
        order.push(lv);
    }
    if !failures.is_empty() {
        return Err(failures);
    }
    let order = DiagramOrder::new(b, order).map_err(input)?;
    Ok(Synthesis { order, runs })
}

/// Stationary data: synthesize once with cells at level 2 and repeat the
/// resulting words at every level from 2 on.
pub fn synthesize_stationary(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    policy: WalkPolicy,
) -> Result<(Vec<Vec<usize>>, Synthesis), Vec<TargetFailure>> {
    let input = |e: Error| vec![TargetFailure { level: 0, target: 0, failure: e.into() }];
    if !b.is_stationary() {
        return Err(input(Error::NotApplicable("diagram is not stationary".into())));
    }
    let deep = b.extend_to(b.depth().max(3)).map_err(input)?;
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    let mut block = Vec::new();
    for u in 0..deep.vertex_count(3) {
        match synthesize_target(&deep, skeleton, sigma, 2, u, policy) {
            Ok(s) => {
                block.push(s.word.clone());
                runs.push(s);
            }
            Err(failure) => failures.push(TargetFailure { level: 3, target: u, failure }),
        }
    }
    if !failures.is_empty() {
        return Err(failures);
    }
    let order = DiagramOrder::stationary(b, &block).map_err(input)?;
    Ok((block, Synthesis { order, runs }))
}

/// All words on the letters of row `u` that start at `s(ē_u)`, end at
/// `s(ẽ_u)` and obey the successor law. Exhaustive, for small rows only.
pub fn admissible_words(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
    u: usize,
    limit: usize,
) -> Result<Vec<Vec<usize>>, Error> {
    let t = Target::new(b, skeleton, sigma, n, u)?;
    let mut rem = t.row.clone();
    let total: Count = rem.iter().sum();
    let mut out = Vec::new();
    rem[t.mu_u] -= 1;
    let mut word = vec![t.mu_u];
    fn rec(t: &Target, rem: &mut Vec<Count>, word: &mut Vec<usize>, total: usize, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if word.len() == total {
            if *word.last().unwrap() == t.tau_u {
                out.push(word.clone());
            }
            return;
        }
        let x = *word.last().unwrap();
        for y in 0..rem.len() {
            if rem[y] > 0 && t.allowed(x, t.mu[y]) {
                rem[y] -= 1;
                word.push(y);
                rec(t, rem, word, total, out, limit);
                word.pop();
                rem[y] += 1;
            }
        }
    }
    rec(&t, &mut rem, &mut word, total as usize, &mut out, limit);
    Ok(out)
}

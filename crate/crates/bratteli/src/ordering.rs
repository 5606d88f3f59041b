//! Orders on incoming edge sets and everything they induce: lexicographic
//! words, level languages, extremal paths and the Vershik successor.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::{BratteliDiagram, Count, EdgeId, Telescoped};
use crate::error::{Error, Result};

/// Upper bound on the length of a materialised word.
pub const MAX_WORD_LEN: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramOrder {
    // order[n-1][v]: incoming edges of v at level n, minimal first
    order: Vec<Vec<Vec<EdgeId>>>,
    // rank[n-1][v][enumeration position]
    rank: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extremal {
    Max,
    Min,
}

impl DiagramOrder {
    /// Validates that every list is a permutation of `r^{-1}(v)`.
    pub fn new(b: &BratteliDiagram, order: Vec<Vec<Vec<EdgeId>>>) -> Result<Self> {
        if order.len() != b.depth() {
            return Err(Error::InvalidOrder(format!(
                "order covers {} levels, diagram has depth {}",
                order.len(),
                b.depth()
            )));
        }
        let mut rank = Vec::with_capacity(order.len());
        for (i, level) in order.iter().enumerate() {
            let n = i + 1;
            if level.len() != b.vertex_count(n) {
                return Err(Error::InvalidOrder(format!(
                    "level {n} lists {} vertices, expected {}",
                    level.len(),
                    b.vertex_count(n)
                )));
            }
            let mut level_rank = Vec::with_capacity(level.len());
            for (v, edges) in level.iter().enumerate() {
                let deg = b.in_degree(n, v) as usize;
                if edges.len() != deg {
                    return Err(Error::InvalidOrder(format!(
                        "vertex {v} at level {n} lists {} edges, expected {deg}",
                        edges.len()
                    )));
                }
                let mut r = vec![usize::MAX; deg];
                for (pos, e) in edges.iter().enumerate() {
                    if e.level != n || e.range != v {
                        return Err(Error::InvalidOrder(format!(
                            "edge {e} listed under vertex {v} at level {n}"
                        )));
                    }
                    let idx = b.edge_position(e).map_err(|err| Error::InvalidOrder(err.to_string()))?;
                    if r[idx] != usize::MAX {
                        return Err(Error::InvalidOrder(format!("edge {e} listed twice")));
                    }
                    r[idx] = pos;
                }
                level_rank.push(r);
            }
            rank.push(level_rank);
        }
        Ok(DiagramOrder { order, rank })
    }

    /// The order in which edges are enumerated.
    pub fn enumeration(b: &BratteliDiagram) -> Self {
        let order = (1..=b.depth())
            .map(|n| (0..b.vertex_count(n)).map(|v| b.incoming(n, v)).collect())
            .collect();
        Self::new(b, order).expect("enumeration order is valid")
    }

    /// Builds an order from source words `words[n-1][v]`; parallel edges get
    /// copy indices in order of occurrence.
    pub fn from_source_words(b: &BratteliDiagram, words: &[Vec<Vec<usize>>]) -> Result<Self> {
        let mut order = Vec::with_capacity(words.len());
        for (i, level) in words.iter().enumerate() {
            let n = i + 1;
            let mut lv = Vec::with_capacity(level.len());
            for (v, word) in level.iter().enumerate() {
                lv.push(edges_from_word(n, v, word));
            }
            order.push(lv);
        }
        Self::new(b, order)
    }

    /// Level 1 keeps the enumeration order, every level from 2 on uses
    /// `block[v]` as the source word of `v`.
    pub fn stationary(b: &BratteliDiagram, block: &[Vec<usize>]) -> Result<Self> {
        let mut words = Vec::with_capacity(b.depth());
        for n in 1..=b.depth() {
            if n == 1 {
                words.push(
                    (0..b.vertex_count(1))
                        .map(|v| b.incoming(1, v).iter().map(|e| e.source).collect())
                        .collect(),
                );
            } else {
                words.push(block.to_vec());
            }
        }
        Self::from_source_words(b, &words)
    }

    pub fn depth(&self) -> usize {
        self.order.len()
    }

    pub fn edges_into(&self, level: usize, v: usize) -> &[EdgeId] {
        &self.order[level - 1][v]
    }

    pub fn levels(&self) -> &[Vec<Vec<EdgeId>>] {
        &self.order
    }

    pub fn max_edge(&self, level: usize, v: usize) -> EdgeId {
        *self.order[level - 1][v].last().unwrap()
    }

    pub fn min_edge(&self, level: usize, v: usize) -> EdgeId {
        self.order[level - 1][v][0]
    }

    pub fn extremal_edge(&self, kind: Extremal, level: usize, v: usize) -> EdgeId {
        match kind {
            Extremal::Max => self.max_edge(level, v),
            Extremal::Min => self.min_edge(level, v),
        }
    }

    pub fn rank(&self, b: &BratteliDiagram, e: &EdgeId) -> Result<usize> {
        let idx = b.edge_position(e)?;
        Ok(self.rank[e.level - 1][e.range][idx])
    }

    /// The edge immediately above `e` in `r^{-1}(r(e))`.
    pub fn next_edge(&self, b: &BratteliDiagram, e: &EdgeId) -> Result<Option<EdgeId>> {
        let r = self.rank(b, e)?;
        Ok(self.order[e.level - 1][e.range].get(r + 1).copied())
    }

    /// `w(v, level-1, level)`.
    pub fn source_word(&self, level: usize, v: usize) -> Vec<usize> {
        self.order[level - 1][v].iter().map(|e| e.source).collect()
    }

    pub fn source_words(&self, level: usize) -> Vec<Vec<usize>> {
        (0..self.order[level - 1].len()).map(|v| self.source_word(level, v)).collect()
    }

    /// Restricts to the first `depth` levels.
    pub fn truncate(&self, depth: usize) -> DiagramOrder {
        DiagramOrder {
            order: self.order[..depth].to_vec(),
            rank: self.rank[..depth].to_vec(),
        }
    }

    /// Source of the maximal edge into each vertex of `level`.
    pub fn tau(&self, level: usize) -> Vec<usize> {
        (0..self.order[level - 1].len()).map(|v| self.max_edge(level, v).source).collect()
    }

    /// Source of the minimal edge into each vertex of `level`.
    pub fn mu(&self, level: usize) -> Vec<usize> {
        (0..self.order[level - 1].len()).map(|v| self.min_edge(level, v).source).collect()
    }

    /// Source words of levels `from..=depth` coincide (as in a stationary order).
    pub fn is_stationary_from(&self, from: usize) -> bool {
        (from + 1..=self.depth()).all(|n| self.source_words(n) == self.source_words(from))
    }
}

/// Edges into `v` at `level` read off a source word.
pub fn edges_from_word(level: usize, v: usize, word: &[usize]) -> Vec<EdgeId> {
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    word.iter()
        .map(|&s| {
            let c = seen.entry(s).or_insert(0);
            let e = EdgeId::new(level, v, s, *c);
            *c += 1;
            e
        })
        .collect()
}

/// The maximal (minimal) path from `V_n` to `u` in `V_m`, lowest edge first.
pub fn extremal_path(
    b: &BratteliDiagram,
    omega: &DiagramOrder,
    kind: Extremal,
    n: usize,
    m: usize,
    u: usize,
) -> Result<Vec<EdgeId>> {
    if n >= m {
        return Err(Error::InvalidLevels(format!("extremal path from {n} to {m}")));
    }
    b.check_vertex(m, u)?;
    let mut path = Vec::with_capacity(m - n);
    let mut x = u;
    for t in (n + 1..=m).rev() {
        let e = omega.extremal_edge(kind, t, x);
        path.push(e);
        x = e.source;
    }
    path.reverse();
    Ok(path)
}

/// `w(v, m, n)`: the level-`m` sources of all paths into `v` in lexicographic order.
pub fn word(
    b: &BratteliDiagram,
    omega: &DiagramOrder,
    n: usize,
    v: usize,
    m: usize,
) -> Result<Vec<usize>> {
    if m >= n {
        return Err(Error::InvalidLevels(format!("word from level {m} to {n}")));
    }
    b.check_vertex(n, v)?;
    let len: Count = b.product(m, n)?.row_sum(v);
    if len > MAX_WORD_LEN {
        return Err(Error::TooLarge(format!("word of length {len}")));
    }
    let mut current = vec![v];
    for t in (m + 1..=n).rev() {
        let mut next = Vec::new();
        for &x in &current {
            next.extend(omega.edges_into(t, x).iter().map(|e| e.source));
        }
        current = next;
    }
    Ok(current)
}

/// Every path from `V_m` into `v` at level `n`, lowest edge first, in
/// enumeration order (not the order `omega`).
pub fn paths_into(b: &BratteliDiagram, n: usize, v: usize, m: usize) -> Vec<Vec<EdgeId>> {
    if n == m {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for e in b.incoming(n, v) {
        for mut p in paths_into(b, n - 1, e.source, m) {
            p.push(e);
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Debug)]
struct Summary {
    factors: BTreeSet<Vec<usize>>,
    prefix: Vec<usize>,
    suffix: Vec<usize>,
    len: u64,
}

impl Summary {
    fn letter(x: usize, k: usize) -> Summary {
        let mut factors = BTreeSet::new();
        factors.insert(vec![x]);
        let edge = if k > 1 { vec![x] } else { vec![] };
        Summary { factors, prefix: edge.clone(), suffix: edge, len: 1 }
    }

    fn concat(&self, other: &Summary, k: usize) -> Summary {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        let junction: Vec<usize> = self.suffix.iter().chain(other.prefix.iter()).copied().collect();
        let split = self.suffix.len();
        for start in 0..split {
            for end in split + 1..=junction.len() {
                if end - start <= k {
                    factors.insert(junction[start..end].to_vec());
                }
            }
        }
        let keep = k.saturating_sub(1);
        let mut prefix = self.prefix.clone();
        if (self.len as usize) < keep || prefix.len() < keep {
            prefix.extend(other.prefix.iter().copied());
            prefix.truncate(keep);
        }
        let mut suffix = other.suffix.clone();
        if (other.len as usize) < keep || suffix.len() < keep {
            let mut s = self.suffix.clone();
            s.extend(other.suffix.iter().copied());
            let cut = s.len().saturating_sub(keep);
            suffix = s[cut..].to_vec();
        }
        Summary { factors, prefix, suffix, len: self.len + other.len }
    }
}

/// Factors of length at most `max_len` of the words `w(v, n, horizon)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelLanguage {
    pub level: usize,
    pub horizon: usize,
    pub max_len: usize,
    pub factors: BTreeSet<Vec<usize>>,
}

impl LevelLanguage {
    pub fn contains(&self, w: &[usize]) -> bool {
        self.factors.contains(w)
    }

    pub fn two_letter(&self) -> BTreeSet<(usize, usize)> {
        self.factors
            .iter()
            .filter(|f| f.len() == 2)
            .map(|f| (f[0], f[1]))
            .collect()
    }

    pub fn of_length(&self, len: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.factors.iter().filter(move |f| f.len() == len)
    }
}

pub fn level_language(
    b: &BratteliDiagram,
    omega: &DiagramOrder,
    n: usize,
    horizon: usize,
    max_len: usize,
) -> Result<LevelLanguage> {
    if n >= horizon {
        return Err(Error::InvalidLevels(format!("language at level {n} with horizon {horizon}")));
    }
    b.check_level(horizon)?;
    if max_len == 0 {
        return Err(Error::NotApplicable("factor length must be positive".into()));
    }
    let mut summaries: Vec<Summary> = (0..b.vertex_count(n)).map(|x| Summary::letter(x, max_len)).collect();
    for t in n + 1..=horizon {
        summaries = (0..b.vertex_count(t))
            .map(|v| {
                let edges = omega.edges_into(t, v);
                let mut acc = summaries[edges[0].source].clone();
                for e in &edges[1..] {
                    acc = acc.concat(&summaries[e.source], max_len);
                }
                acc
            })
            .collect();
    }
    let mut factors = BTreeSet::new();
    for s in summaries {
        factors.extend(s.factors);
    }
    Ok(LevelLanguage { level: n, horizon, max_len, factors })
}

fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

/// Two-letter words of the limit language of a stationary order with block
/// source words `block`: factors of the block words together with every
/// `tau^k(x) mu^k(y)` for a factor `xy`.
pub fn stationary_two_language(block: &[Vec<usize>]) -> BTreeSet<(usize, usize)> {
    let d = block.len();
    let tau: Vec<usize> = block.iter().map(|w| *w.last().unwrap()).collect();
    let mu: Vec<usize> = block.iter().map(|w| w[0]).collect();
    let base: BTreeSet<(usize, usize)> = block
        .iter()
        .flat_map(|w| w.windows(2).map(|p| (p[0], p[1])))
        .collect();
    let mut out = base.clone();
    let mut tk: Vec<usize> = (0..d).collect();
    let mut mk: Vec<usize> = (0..d).collect();
    let mut seen = BTreeSet::new();
    while seen.insert((tk.clone(), mk.clone())) {
        for &(x, y) in &base {
            out.insert((tk[x], mk[y]));
        }
        tk = compose(&tau, &tk);
        mk = compose(&mu, &mk);
    }
    out
}

/// Transports `omega` to the telescoped diagram: paths are compared at the
/// highest level where they differ.
pub fn telescope_order(
    b: &BratteliDiagram,
    omega: &DiagramOrder,
    t: &Telescoped,
) -> Result<DiagramOrder> {
    let nb = &t.diagram;
    let mut order = Vec::with_capacity(nb.depth());
    for n in 1..=nb.depth() {
        let mut lv = Vec::with_capacity(nb.vertex_count(n));
        for v in 0..nb.vertex_count(n) {
            let mut keyed = Vec::new();
            for e in nb.incoming(n, v) {
                let path = t.path_of(&e)?;
                let mut key = Vec::with_capacity(path.len());
                for pe in path.iter().rev() {
                    key.push(omega.rank(b, pe)?);
                }
                keyed.push((key, e));
            }
            keyed.sort();
            lv.push(keyed.into_iter().map(|(_, e)| e).collect());
        }
        order.push(lv);
    }
    DiagramOrder::new(nb, order)
}

/// Next path in the lexicographic order on paths from the root into the same
/// vertex, or `None` when `path` is maximal.
pub fn vershik_successor(
    b: &BratteliDiagram,
    omega: &DiagramOrder,
    path: &[EdgeId],
) -> Result<Option<Vec<EdgeId>>> {
    check_root_path(b, path)?;
    for k in 0..path.len() {
        if let Some(next) = omega.next_edge(b, &path[k])? {
            let mut out = path.to_vec();
            out[k] = next;
            let mut x = next.source;
            for j in (0..k).rev() {
                let e = omega.min_edge(j + 1, x);
                out[j] = e;
                x = e.source;
            }
            return Ok(Some(out));
        }
    }
    Ok(None)
}

fn check_root_path(b: &BratteliDiagram, path: &[EdgeId]) -> Result<()> {
    if path.is_empty() {
        return Err(Error::NoSuchEdge("empty path".into()));
    }
    for (i, e) in path.iter().enumerate() {
        b.check_edge(e)?;
        if e.level != i + 1 {
            return Err(Error::NoSuchEdge(format!("edge {e} at position {i}")));
        }
        if i > 0 && path[i - 1].range != e.source {
            return Err(Error::NoSuchEdge(format!("path breaks before {e}")));
        }
    }
    Ok(())
}

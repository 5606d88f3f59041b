//! Bratteli diagrams truncated at a finite depth.
//!
//! Level `n` has `vertex_counts[n]` vertices and the edges of `E_{n+1}` are
//! encoded by the incidence matrix `F_n` (rows index `V_{n+1}`, columns `V_n`).
//! Edges are identified by `(level, range, source, copy)` and enumerated
//! source-major, copy-minor inside each `r^{-1}(v)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Count = u64;

/// Nonnegative integer matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Count>,
}

impl IncidenceMatrix {
    pub fn from_rows(rows: Vec<Vec<Count>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Dimension("matrix has no rows".into()));
        }
        let c = rows[0].len();
        if c == 0 {
            return Err(Error::Dimension("matrix has no columns".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(IncidenceMatrix { rows: r, cols: c, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IncidenceMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn ones_column(n: usize) -> Self {
        IncidenceMatrix { rows: n, cols: 1, data: vec![1; n] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Count {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Count) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Count] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_sum(&self, r: usize) -> Count {
        self.row(r).iter().sum()
    }

    pub fn col_sum(&self, c: usize) -> Count {
        (0..self.rows).map(|r| self.get(r, c)).sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<Count>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&x| x > 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// `self * rhs`, failing on overflow.
    pub fn checked_mul(&self, rhs: &IncidenceMatrix) -> Result<IncidenceMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let term = a
                        .checked_mul(rhs.get(k, j))
                        .ok_or_else(|| Error::Overflow("matrix product".into()))?;
                    let cell = &mut out.data[i * rhs.cols + j];
                    *cell = cell
                        .checked_add(term)
                        .ok_or_else(|| Error::Overflow("matrix product".into()))?;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_pow(&self, k: u32) -> Result<IncidenceMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = self.checked_mul(&acc)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Identity of one edge of `E_level`: it runs from `source` in `V_{level-1}`
/// to `range` in `V_level`, and `copy` separates parallel edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub level: usize,
    pub range: usize,
    pub source: usize,
    pub copy: usize,
}

impl EdgeId {
    pub fn new(level: usize, range: usize, source: usize, copy: usize) -> Self {
        EdgeId { level, range, source, copy }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}[{}->{}#{}]", self.level, self.source, self.range, self.copy)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BratteliDiagram {
    vertex_counts: Vec<usize>,
    matrices: Vec<IncidenceMatrix>,
    stationary_block: Option<IncidenceMatrix>,
    labels: Vec<Vec<String>>,
}

/// Input for [`build_diagram`].
#[derive(Clone, Debug)]
pub enum DiagramSpec {
    Matrices {
        matrices: Vec<IncidenceMatrix>,
        stationary: bool,
    },
    Edges {
        vertex_counts: Vec<usize>,
        /// `edges[n-1]` lists `(source, range)` for every edge of `E_n`.
        edges: Vec<Vec<(usize, usize)>>,
        stationary: bool,
    },
}

pub fn build_diagram(spec: &DiagramSpec) -> Result<BratteliDiagram> {
    match spec {
        DiagramSpec::Matrices { matrices, stationary } => {
            let b = BratteliDiagram::from_matrices(matrices.clone())?;
            if *stationary {
                b.into_stationary()
            } else {
                Ok(b)
            }
        }
        DiagramSpec::Edges { vertex_counts, edges, stationary } => {
            let b = BratteliDiagram::from_edges(vertex_counts, edges)?;
            if *stationary {
                b.into_stationary()
            } else {
                Ok(b)
            }
        }
    }
}

fn default_label(level: usize, v: usize) -> String {
    if level == 0 {
        "v0".to_string()
    } else {
        format!("v{}", v + 1)
    }
}

impl BratteliDiagram {
    pub fn from_matrices(matrices: Vec<IncidenceMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::ZeroDepth);
        }
        let mut vertex_counts = vec![matrices[0].cols()];
        for (n, m) in matrices.iter().enumerate() {
            if m.cols() != vertex_counts[n] {
                return Err(Error::Dimension(format!(
                    "F_{n} has {} columns but level {n} has {} vertices",
                    m.cols(),
                    vertex_counts[n]
                )));
            }
            vertex_counts.push(m.rows());
        }
        if vertex_counts[0] != 1 {
            return Err(Error::Dimension(format!(
                "level 0 must be a single vertex, got {}",
                vertex_counts[0]
            )));
        }
        for (n, m) in matrices.iter().enumerate() {
            for c in 0..m.cols() {
                if m.col_sum(c) == 0 {
                    return Err(Error::NoOutgoing { level: n, vertex: c });
                }
            }
            for r in 0..m.rows() {
                if m.row_sum(r) == 0 {
                    return Err(Error::NoIncoming { level: n + 1, vertex: r });
                }
            }
        }
        let labels = vertex_counts
            .iter()
            .enumerate()
            .map(|(n, &k)| (0..k).map(|v| default_label(n, v)).collect())
            .collect();
        Ok(BratteliDiagram { vertex_counts, matrices, stationary_block: None, labels })
    }

    pub fn from_edges(vertex_counts: &[usize], edges: &[Vec<(usize, usize)>]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::ZeroDepth);
        }
        if vertex_counts.len() != edges.len() + 1 {
            return Err(Error::Dimension(format!(
                "{} vertex counts for {} edge levels",
                vertex_counts.len(),
                edges.len()
            )));
        }
        let mut matrices = Vec::with_capacity(edges.len());
        for (n, level_edges) in edges.iter().enumerate() {
            let mut m = IncidenceMatrix::zeros(vertex_counts[n + 1], vertex_counts[n]);
            for &(s, r) in level_edges {
                if s >= vertex_counts[n] {
                    return Err(Error::VertexOutOfRange { level: n, vertex: s });
                }
                if r >= vertex_counts[n + 1] {
                    return Err(Error::VertexOutOfRange { level: n + 1, vertex: r });
                }
                m.set(r, s, m.get(r, s) + 1);
            }
            matrices.push(m);
        }
        Self::from_matrices(matrices)
    }

    /// Root column of ones followed by `depth - 1` copies of `block`.
    pub fn stationary(block: IncidenceMatrix, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        if block.rows() != block.cols() {
            return Err(Error::Dimension("stationary block must be square".into()));
        }
        let mut matrices = vec![IncidenceMatrix::ones_column(block.cols())];
        for _ in 1..depth {
            matrices.push(block.clone());
        }
        let mut b = Self::from_matrices(matrices)?;
        b.stationary_block = Some(block);
        Ok(b)
    }

    /// Declare the matrices after the root level to be one repeating block.
    pub fn into_stationary(mut self) -> Result<Self> {
        let block = if self.matrices.len() >= 2 {
            self.matrices[1].clone()
        } else {
            let n = self.vertex_counts[1];
            if self.matrices[0].rows() != n {
                return Err(Error::Dimension("stationary block undetermined".into()));
            }
            return Err(Error::DepthTooSmall(
                "a stationary diagram needs at least one matrix after the root level".into(),
            ));
        };
        if block.rows() != block.cols() {
            return Err(Error::Dimension("stationary block must be square".into()));
        }
        for (n, m) in self.matrices.iter().enumerate().skip(1) {
            if *m != block {
                return Err(Error::Dimension(format!(
                    "F_{n} differs from the stationary block"
                )));
            }
        }
        self.stationary_block = Some(block);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.is_empty() {
            return Ok(self);
        }
        let mut expanded = Vec::with_capacity(self.vertex_counts.len());
        for n in 0..self.vertex_counts.len() {
            let src = if n < labels.len() { &labels[n] } else { labels.last().unwrap() };
            if src.len() != self.vertex_counts[n] {
                if n == 0 && labels.len() < self.vertex_counts.len() {
                    expanded.push(vec![default_label(0, 0)]);
                    continue;
                }
                return Err(Error::Dimension(format!(
                    "{} labels for level {n} with {} vertices",
                    src.len(),
                    self.vertex_counts[n]
                )));
            }
            expanded.push(src.clone());
        }
        self.labels = expanded;
        Ok(self)
    }

    /// Labels for every level from 1 on, level 0 keeps its default.
    pub fn with_uniform_labels(self, labels: &[&str]) -> Result<Self> {
        let mut all = vec![vec![default_label(0, 0)]];
        for _ in 1..self.vertex_counts.len() {
            all.push(labels.iter().map(|s| s.to_string()).collect());
        }
        self.with_labels(all)
    }

    pub fn depth(&self) -> usize {
        self.matrices.len()
    }

    pub fn vertex_count(&self, level: usize) -> usize {
        self.vertex_counts[level]
    }

    pub fn vertex_counts(&self) -> &[usize] {
        &self.vertex_counts
    }

    pub fn matrices(&self) -> &[IncidenceMatrix] {
        &self.matrices
    }

    /// `F_n`, the matrix of edges from level `n` to level `n+1`.
    pub fn incidence_matrix(&self, n: usize) -> Result<&IncidenceMatrix> {
        self.matrices
            .get(n)
            .ok_or(Error::LevelOutOfRange { level: n, depth: self.depth() })
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary_block.is_some()
    }

    pub fn stationary_block(&self) -> Option<&IncidenceMatrix> {
        self.stationary_block.as_ref()
    }

    pub fn label(&self, level: usize, v: usize) -> String {
        self.labels
            .get(level)
            .and_then(|l| l.get(v))
            .cloned()
            .unwrap_or_else(|| default_label(level, v))
    }

    pub fn labels(&self, level: usize) -> &[String] {
        &self.labels[level]
    }

    pub fn all_labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn word_string(&self, level: usize, word: &[usize]) -> String {
        let labels = &self.labels[level];
        let single = labels.iter().all(|l| l.chars().count() == 1);
        let parts: Vec<&str> = word.iter().map(|&v| labels[v].as_str()).collect();
        if single {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    pub fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth() {
            Err(Error::LevelOutOfRange { level, depth: self.depth() })
        } else {
            Ok(())
        }
    }

    pub fn check_vertex(&self, level: usize, v: usize) -> Result<()> {
        self.check_level(level)?;
        if v >= self.vertex_counts[level] {
            Err(Error::VertexOutOfRange { level, vertex: v })
        } else {
            Ok(())
        }
    }

    /// `|r^{-1}(v)|` for `v` in `V_level`, `level >= 1`.
    pub fn in_degree(&self, level: usize, v: usize) -> Count {
        self.matrices[level - 1].row_sum(v)
    }

    pub fn multiplicity(&self, level: usize, range: usize, source: usize) -> Count {
        self.matrices[level - 1].get(range, source)
    }

    /// Incoming edges of `v` in enumeration order.
    pub fn incoming(&self, level: usize, v: usize) -> Vec<EdgeId> {
        let m = &self.matrices[level - 1];
        let mut out = Vec::with_capacity(m.row_sum(v) as usize);
        for s in 0..m.cols() {
            for c in 0..m.get(v, s) as usize {
                out.push(EdgeId::new(level, v, s, c));
            }
        }
        out
    }

    pub fn edges(&self, level: usize) -> Vec<EdgeId> {
        (0..self.vertex_counts[level]).flat_map(|v| self.incoming(level, v)).collect()
    }

    pub fn check_edge(&self, e: &EdgeId) -> Result<()> {
        if e.level == 0 || e.level > self.depth() {
            return Err(Error::NoSuchEdge(e.to_string()));
        }
        if e.range >= self.vertex_counts[e.level] || e.source >= self.vertex_counts[e.level - 1] {
            return Err(Error::NoSuchEdge(e.to_string()));
        }
        if (e.copy as Count) >= self.multiplicity(e.level, e.range, e.source) {
            return Err(Error::NoSuchEdge(e.to_string()));
        }
        Ok(())
    }

    /// Position of `e` inside the enumeration of `r^{-1}(r(e))`.
    pub fn edge_position(&self, e: &EdgeId) -> Result<usize> {
        self.check_edge(e)?;
        let row = self.matrices[e.level - 1].row(e.range);
        let before: Count = row[..e.source].iter().sum();
        Ok(before as usize + e.copy)
    }

    pub fn edge_at(&self, level: usize, v: usize, position: usize) -> Result<EdgeId> {
        let row = self.matrices[level - 1].row(v);
        let mut p = position as Count;
        for (s, &f) in row.iter().enumerate() {
            if p < f {
                return Ok(EdgeId::new(level, v, s, p as usize));
            }
            p -= f;
        }
        Err(Error::NoSuchEdge(format!("position {position} into vertex {v} at level {level}")))
    }

    /// `F_{n-1} ... F_m`, the path counts from `V_m` to `V_n`.
    pub fn product(&self, m: usize, n: usize) -> Result<IncidenceMatrix> {
        if m > n {
            return Err(Error::InvalidLevels(format!("product from {m} to {n}")));
        }
        self.check_level(n)?;
        let mut acc = IncidenceMatrix::identity(self.vertex_counts[m]);
        for k in m..n {
            acc = self.matrices[k].checked_mul(&acc)?;
        }
        Ok(acc)
    }

    /// Stationary diagrams can be lengthened by repeating their block.
    pub fn extend_to(&self, depth: usize) -> Result<BratteliDiagram> {
        if depth <= self.depth() {
            return self.truncate(depth);
        }
        let block = self.stationary_block.as_ref().ok_or_else(|| {
            Error::NotApplicable("only stationary diagrams can be extended".into())
        })?;
        let mut matrices = self.matrices.clone();
        while matrices.len() < depth {
            matrices.push(block.clone());
        }
        let mut b = Self::from_matrices(matrices)?;
        b.stationary_block = Some(block.clone());
        b.with_labels(self.labels.clone())
    }

    pub fn truncate(&self, depth: usize) -> Result<BratteliDiagram> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        if depth > self.depth() {
            return Err(Error::LevelOutOfRange { level: depth, depth: self.depth() });
        }
        let mut b = Self::from_matrices(self.matrices[..depth].to_vec())?;
        if depth >= 2 {
            b.stationary_block = self.stationary_block.clone();
        }
        b.labels = self.labels[..=depth].to_vec();
        Ok(b)
    }
}

/// A telescoped diagram together with the path-edge bijection.
///
/// Paths between two retained levels are ranked top-down: the topmost edge is
/// the most significant digit, each digit ordered by edge enumeration.
#[derive(Clone, Debug)]
pub struct Telescoped {
    pub diagram: BratteliDiagram,
    pub levels: Vec<usize>,
    base: BratteliDiagram,
    // prods[i][t - levels[i]] = path counts from V_{levels[i]} to V_t
    prods: Vec<Vec<IncidenceMatrix>>,
}

pub fn telescope(b: &BratteliDiagram, levels: &[usize]) -> Result<Telescoped> {
    if levels.len() < 2 {
        return Err(Error::InvalidLevels("need at least two levels".into()));
    }
    if levels[0] != 0 {
        return Err(Error::InvalidLevels("first level must be 0".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidLevels("levels must be strictly increasing".into()));
    }
    if *levels.last().unwrap() > b.depth() {
        return Err(Error::InvalidLevels(format!(
            "level {} exceeds depth {}",
            levels.last().unwrap(),
            b.depth()
        )));
    }
    let mut prods = Vec::with_capacity(levels.len() - 1);
    let mut matrices = Vec::with_capacity(levels.len() - 1);
    for w in levels.windows(2) {
        let mut chain = vec![IncidenceMatrix::identity(b.vertex_count(w[0]))];
        for t in w[0]..w[1] {
            let next = b.matrices[t].checked_mul(chain.last().unwrap())?;
            chain.push(next);
        }
        matrices.push(chain.last().unwrap().clone());
        prods.push(chain);
    }
    let mut diagram = BratteliDiagram::from_matrices(matrices)?;
    diagram.labels = levels.iter().map(|&l| b.labels[l].clone()).collect();
    if let Some(block) = b.stationary_block() {
        let gaps: Vec<usize> = levels.windows(2).skip(1).map(|w| w[1] - w[0]).collect();
        if !gaps.is_empty() && gaps.iter().all(|&g| g == gaps[0]) {
            diagram.stationary_block = Some(block.checked_pow(gaps[0] as u32)?);
        }
    }
    Ok(Telescoped { diagram, levels: levels.to_vec(), base: b.clone(), prods })
}

impl Telescoped {
    pub fn base(&self) -> &BratteliDiagram {
        &self.base
    }

    fn count(&self, i: usize, t: usize, y: usize, w: usize) -> Count {
        self.prods[i][t - self.levels[i]].get(y, w)
    }

    /// The path of the base diagram that the telescoped edge `e` stands for,
    /// listed from the lowest level up.
    pub fn path_of(&self, e: &EdgeId) -> Result<Vec<EdgeId>> {
        self.diagram.check_edge(e)?;
        let i = e.level - 1;
        let (a, top) = (self.levels[i], self.levels[i + 1]);
        let w = e.source;
        let mut rank = e.copy as Count;
        let mut x = e.range;
        let mut path = Vec::with_capacity(top - a);
        for t in (a + 1..=top).rev() {
            let row = self.base.matrices[t - 1].row(x);
            let mut chosen = None;
            for (y, &f) in row.iter().enumerate() {
                let per = self.count(i, t - 1, y, w);
                let total = f * per;
                if rank < total {
                    chosen = Some(EdgeId::new(t, x, y, (rank / per) as usize));
                    rank %= per;
                    break;
                }
                rank -= total;
            }
            let edge = chosen.ok_or_else(|| Error::NoSuchEdge(format!("unranking {e}")))?;
            path.push(edge);
            x = edge.source;
        }
        path.reverse();
        Ok(path)
    }

    /// Inverse of [`Telescoped::path_of`].
    pub fn edge_of(&self, path: &[EdgeId]) -> Result<EdgeId> {
        let first = path.first().ok_or_else(|| Error::NoSuchEdge("empty path".into()))?;
        let a = first.level - 1;
        let i = self
            .levels
            .iter()
            .position(|&l| l == a)
            .filter(|&i| i + 1 < self.levels.len())
            .ok_or_else(|| Error::NoSuchEdge(format!("path does not start at a retained level: {a}")))?;
        let top = self.levels[i + 1];
        if path.len() != top - a {
            return Err(Error::NoSuchEdge("path does not span consecutive retained levels".into()));
        }
        for (k, e) in path.iter().enumerate() {
            self.base.check_edge(e)?;
            if e.level != a + 1 + k {
                return Err(Error::NoSuchEdge(format!("edge {e} at wrong level")));
            }
            if k > 0 && path[k - 1].range != e.source {
                return Err(Error::NoSuchEdge(format!("path breaks before {e}")));
            }
        }
        let w = first.source;
        let mut rank: Count = 0;
        for e in path.iter().rev() {
            let t = e.level;
            let row = self.base.matrices[t - 1].row(e.range);
            for (y, &f) in row.iter().enumerate().take(e.source) {
                rank += f * self.count(i, t - 1, y, w);
            }
            rank += e.copy as Count * self.count(i, t - 1, e.source, w);
        }
        Ok(EdgeId::new(i + 1, path.last().unwrap().range, w, rank as usize))
    }
}

/// Block data of a class-A matrix at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassALevel {
    pub level: usize,
    pub component_columns: Vec<Vec<usize>>,
    pub component_rows: Vec<Vec<usize>>,
    pub rest_columns: Vec<usize>,
    pub rest_rows: Vec<usize>,
    pub c_block: Vec<Vec<Count>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassA {
    pub k: usize,
    pub levels: Vec<ClassALevel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramClass {
    pub checked_depth: usize,
    /// A strictly positive product was found; absence is "not verified".
    pub simple: bool,
    pub simple_witness: Option<(usize, usize)>,
    pub max_vertices: usize,
    pub finite_rank: Option<usize>,
    pub stationary: bool,
    /// A chain of single-edge vertices reaches the checked depth.
    pub candidate_periodic: bool,
    pub class_a: Option<ClassA>,
    pub assumptions: Vec<String>,
}

fn class_a_level(m: &IncidenceMatrix, level: usize) -> Option<ClassALevel> {
    let rows = m.rows();
    let cols = m.cols();
    let positive: Vec<usize> = (0..rows).filter(|&r| m.row(r).iter().all(|&x| x > 0)).collect();
    if positive.len() == rows {
        return Some(ClassALevel {
            level,
            component_columns: vec![(0..cols).collect()],
            component_rows: vec![(0..rows).collect()],
            rest_columns: vec![],
            rest_rows: vec![],
            c_block: vec![],
        });
    }
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for r in 0..rows {
        if positive.contains(&r) {
            continue;
        }
        let support: Vec<usize> = (0..cols).filter(|&c| m.get(r, c) > 0).collect();
        match groups.iter_mut().find(|g| g.0 == support) {
            Some(g) => g.1.push(r),
            None => groups.push((support, vec![r])),
        }
    }
    for (i, a) in groups.iter().enumerate() {
        for b in groups.iter().skip(i + 1) {
            if a.0.iter().any(|c| b.0.contains(c)) {
                return None;
            }
        }
    }
    groups.sort();
    let covered: Vec<usize> = groups.iter().flat_map(|g| g.0.iter().copied()).collect();
    let rest_columns: Vec<usize> = (0..cols).filter(|c| !covered.contains(c)).collect();
    if rest_columns.is_empty() != positive.is_empty() {
        return None;
    }
    let c_block = positive
        .iter()
        .map(|&r| rest_columns.iter().map(|&c| m.get(r, c)).collect())
        .collect();
    Some(ClassALevel {
        level,
        component_columns: groups.iter().map(|g| g.0.clone()).collect(),
        component_rows: groups.iter().map(|g| g.1.clone()).collect(),
        rest_columns,
        rest_rows: positive,
        c_block,
    })
}

fn detect_class_a(b: &BratteliDiagram) -> Option<ClassA> {
    let mut levels: Vec<ClassALevel> = Vec::new();
    for n in 1..b.depth() {
        let mut lvl = class_a_level(&b.matrices[n], n)?;
        if let Some(prev) = levels.last() {
            if prev.component_rows.len() != lvl.component_columns.len() {
                return None;
            }
            // reorder components so that rows of F_{n-1} feed columns of F_n
            let mut order = Vec::with_capacity(lvl.component_columns.len());
            for rows in &prev.component_rows {
                let idx = lvl.component_columns.iter().position(|c| c == rows)?;
                order.push(idx);
            }
            lvl.component_columns = order.iter().map(|&i| lvl.component_columns[i].clone()).collect();
            lvl.component_rows = order.iter().map(|&i| lvl.component_rows[i].clone()).collect();
            if prev.rest_rows != lvl.rest_columns {
                return None;
            }
        }
        levels.push(lvl);
    }
    if levels.is_empty() {
        return None;
    }
    Some(ClassA { k: levels[0].component_columns.len(), levels })
}

/// Structural flags of the diagram up to `check_depth` (stationary diagrams
/// are extended to that depth, others are truncated to it).
pub fn classify(b: &BratteliDiagram, check_depth: usize) -> DiagramClass {
    let view = if b.is_stationary() {
        b.extend_to(check_depth.max(2)).unwrap_or_else(|_| b.clone())
    } else if check_depth >= 1 && check_depth < b.depth() {
        b.truncate(check_depth).unwrap_or_else(|_| b.clone())
    } else {
        b.clone()
    };
    let depth = view.depth();

    let mut simple_witness = None;
    if let Some(block) = view.stationary_block() {
        let d = block.rows();
        let bound = (d - 1) * (d - 1) + 1;
        let mut p = block.clone();
        for k in 1..=bound {
            if p.is_positive() {
                simple_witness = Some((1, 1 + k));
                break;
            }
            match block.checked_mul(&p) {
                Ok(next) => p = next,
                Err(_) => break,
            }
        }
    } else if depth >= 1 {
        for n in 2..=depth {
            if let Ok(p) = view.product(1, n) {
                if p.is_positive() {
                    simple_witness = Some((1, n));
                    break;
                }
            }
        }
    }

    let counts: Vec<usize> = view.vertex_counts()[1..].to_vec();
    let max_vertices = counts.iter().copied().max().unwrap_or(1);
    let tail = &counts[counts.len() / 2..];
    let finite_rank = if view.is_stationary() || tail.iter().all(|&c| c == tail[0]) {
        Some(*tail.iter().min().unwrap())
    } else {
        None
    };

    let mut chain: Vec<bool> = (0..view.vertex_count(1)).map(|v| view.in_degree(1, v) == 1).collect();
    for n in 2..=depth {
        let m = &view.matrices[n - 1];
        chain = (0..view.vertex_count(n))
            .map(|v| {
                m.row_sum(v) == 1 && {
                    let s = m.row(v).iter().position(|&x| x > 0).unwrap();
                    chain[s]
                }
            })
            .collect();
    }
    let candidate_periodic = chain.iter().any(|&c| c);

    DiagramClass {
        checked_depth: depth,
        simple: simple_witness.is_some(),
        simple_witness,
        max_vertices,
        finite_rank,
        stationary: view.is_stationary(),
        candidate_periodic,
        class_a: detect_class_a(&view),
        assumptions: vec!["regularity of the diagram is assumed, not checked".into()],
    }
}

//! Cells `[v̄, ṽ, n]`, the graphs `H_n` on them, crossing numbers and
//! connectivity.

use std::fmt::Write as _;

use petgraph::algo::{connected_components, tarjan_scc};
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::diagram::{BratteliDiagram, Count};
use crate::error::{Error, Result};
use crate::skeleton::{Correspondence, Skeleton};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub min_vertex: usize,
    pub max_vertex: usize,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellPartition {
    pub level: usize,
    pub cells: Vec<Cell>,
    /// Index of the cell containing each vertex of `V_n`.
    pub cell_of: Vec<usize>,
}

impl CellPartition {
    pub fn find(&self, min_vertex: usize, max_vertex: usize) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| c.min_vertex == min_vertex && c.max_vertex == max_vertex)
    }
}

/// Common refinement of the partitions by minimal and maximal source.
pub fn build_cells(b: &BratteliDiagram, skeleton: &Skeleton, n: usize) -> Result<CellPartition> {
    if n == 0 || n > skeleton.depth() {
        return Err(Error::LevelOutOfRange { level: n, depth: skeleton.depth() });
    }
    let k = b.vertex_count(n);
    let mut keys: Vec<(usize, usize)> = (0..k).map(|w| (skeleton.mu(n, w), skeleton.tau(n, w))).collect();
    keys.sort();
    keys.dedup();
    let cells: Vec<Cell> = keys
        .iter()
        .map(|&(m, t)| Cell {
            min_vertex: m,
            max_vertex: t,
            members: (0..k).filter(|&w| skeleton.mu(n, w) == m && skeleton.tau(n, w) == t).collect(),
        })
        .collect();
    let cell_of = (0..k)
        .map(|w| keys.binary_search(&(skeleton.mu(n, w), skeleton.tau(n, w))).unwrap())
        .collect();
    Ok(CellPartition { level: n, cells, cell_of })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssociatedGraph {
    pub level: usize,
    pub partition: CellPartition,
    /// Sorted successor lists.
    pub successors: Vec<Vec<usize>>,
    pub cell_labels: Vec<String>,
}

pub fn build_graph(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
) -> Result<AssociatedGraph> {
    let partition = build_cells(b, skeleton, n)?;
    if n - 1 > sigma.depth() {
        return Err(Error::InvalidCorrespondence(format!("sigma_{} missing", n - 1)));
    }
    let successors = partition
        .cells
        .iter()
        .map(|from| {
            let img = sigma.sigma(n - 1, from.max_vertex);
            (0..partition.cells.len())
                .filter(|&j| img.contains(&partition.cells[j].min_vertex))
                .collect()
        })
        .collect();
    let cell_labels = partition
        .cells
        .iter()
        .map(|c| format!("[{},{}]", b.label(n - 1, c.min_vertex), b.label(n - 1, c.max_vertex)))
        .collect();
    Ok(AssociatedGraph { level: n, partition, successors, cell_labels })
}

impl AssociatedGraph {
    pub fn len(&self) -> usize {
        self.successors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors[from].binary_search(&to).is_ok()
    }

    pub fn has_loop(&self, cell: usize) -> bool {
        self.has_edge(cell, cell)
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    fn petgraph(&self, keep: &[bool]) -> (DiGraph<usize, ()>, Vec<usize>) {
        let mut g = DiGraph::new();
        let mut index = vec![usize::MAX; self.len()];
        let mut nodes = Vec::new();
        for i in 0..self.len() {
            if keep[i] {
                index[i] = nodes.len();
                nodes.push(g.add_node(i));
            }
        }
        for i in 0..self.len() {
            if !keep[i] {
                continue;
            }
            for &j in &self.successors[i] {
                if keep[j] {
                    g.add_edge(nodes[index[i]], nodes[index[j]], ());
                }
            }
        }
        (g, (0..self.len()).filter(|&i| keep[i]).collect())
    }

    /// Strongly connected components of the subgraph on `keep`, each sorted,
    /// ordered by least member.
    pub fn sccs(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let (g, _) = self.petgraph(keep);
        let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|x| g[x]).collect();
                v.sort();
                v
            })
            .collect();
        comps.sort();
        comps
    }

    pub fn reachable_from(&self, start: usize, keep: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.successors[x] {
                if keep[y] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }
}

/// Crossing numbers `P_u` for a target `u` in `V_{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub target: usize,
    pub counts: Vec<Count>,
    /// Cell of `s(ẽ_u)`.
    pub terminal: usize,
    /// Cell of `s(ē_u)`.
    pub start: usize,
}

pub fn crossing_numbers(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    graph: &AssociatedGraph,
    u: usize,
) -> Result<Crossing> {
    let n = graph.level;
    if n + 1 > skeleton.depth() {
        return Err(Error::InvalidSkeleton(format!("no extremal edges at level {}", n + 1)));
    }
    b.check_vertex(n + 1, u)?;
    let f = b.incidence_matrix(n)?;
    let tau_u = skeleton.tau(n + 1, u);
    let mut counts = vec![0; graph.len()];
    for w in 0..f.cols() {
        let mut x = f.get(u, w);
        if w == tau_u {
            x -= 1;
        }
        counts[graph.partition.cell_of[w]] += x;
    }
    Ok(Crossing {
        target: u,
        counts,
        terminal: graph.partition.cell_of[tau_u],
        start: graph.partition.cell_of[skeleton.mu(n + 1, u)],
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub strong: bool,
    pub weak: bool,
    pub sccs: Vec<Vec<usize>>,
}

pub fn connectivity(graph: &AssociatedGraph) -> Connectivity {
    let keep = vec![true; graph.len()];
    let sccs = graph.sccs(&keep);
    let (g, _) = graph.petgraph(&keep);
    Connectivity { strong: sccs.len() == 1, weak: connected_components(&g) == 1, sccs }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositiveConnectivity {
    pub target: usize,
    pub positive_cells: Vec<usize>,
    pub strongly_connected: bool,
    /// `(x, y)` with no path from cell `x` to cell `y` inside the positive cells.
    pub witness: Option<(usize, usize)>,
}

/// Whether the cells with positive crossing number form a strongly connected
/// subgraph. Cells with `P_u = 0` are left out, the terminal cell among them.
pub fn positively_strong(graph: &AssociatedGraph, crossing: &Crossing) -> PositiveConnectivity {
    let keep: Vec<bool> = crossing.counts.iter().map(|&c| c > 0).collect();
    let positive_cells: Vec<usize> = (0..graph.len()).filter(|&i| keep[i]).collect();
    let sccs = graph.sccs(&keep);
    if sccs.len() <= 1 {
        return PositiveConnectivity {
            target: crossing.target,
            positive_cells,
            strongly_connected: true,
            witness: None,
        };
    }
    let comp_of = |x: usize| sccs.iter().position(|c| c.contains(&x)).unwrap();
    let is_sink = |ci: usize| {
        sccs[ci]
            .iter()
            .all(|&x| graph.successors[x].iter().all(|&y| !keep[y] || comp_of(y) == ci))
    };
    let x = positive_cells.iter().copied().find(|&x| is_sink(comp_of(x))).unwrap();
    let reach = graph.reachable_from(x, &keep);
    let y = positive_cells.iter().copied().find(|&y| !reach[y]).unwrap();
    PositiveConnectivity {
        target: crossing.target,
        positive_cells,
        strongly_connected: false,
        witness: Some((x, y)),
    }
}

/// DOT rendering; crossing numbers are added to the labels when given.
pub fn export_dot(graph: &AssociatedGraph, crossing: Option<&Crossing>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph H{} {{", graph.level);
    for (i, label) in graph.cell_labels.iter().enumerate() {
        let text = match crossing {
            Some(c) => {
                let mark = if c.terminal == i { " T" } else { "" };
                format!("{label}\\nP={}{mark}", c.counts[i])
            }
            None => label.clone(),
        };
        let _ = writeln!(s, "  c{i} [label=\"{text}\"];");
    }
    for (i, succ) in graph.successors.iter().enumerate() {
        for j in succ {
            let _ = writeln!(s, "  c{i} -> c{j};");
        }
    }
    s.push_str("}\n");
    s
}

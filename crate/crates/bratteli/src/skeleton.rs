//! Skeletons (designated extremal edges and vertices) and correspondences.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diagram::{telescope, BratteliDiagram, EdgeId};
use crate::error::{Error, Result};
use crate::ordering::{level_language, telescope_order, DiagramOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonLevel {
    pub max_edge: Vec<EdgeId>,
    pub min_edge: Vec<EdgeId>,
    pub max_vertices: BTreeSet<usize>,
    pub min_vertices: BTreeSet<usize>,
}

/// Extremal data for levels `1..=depth`; level 0 is the root on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    levels: Vec<SkeletonLevel>,
}

fn root_set() -> BTreeSet<usize> {
    [0].into_iter().collect()
}

/// Periodic points of a self-map of `0..f.len()`.
pub fn periodic_points(f: &[usize]) -> BTreeSet<usize> {
    let n = f.len();
    let mut image: Vec<usize> = (0..n).collect();
    for _ in 0..n {
        image = image.iter().map(|&x| f[x]).collect();
    }
    image.into_iter().collect()
}

impl Skeleton {
    pub fn new(b: &BratteliDiagram, levels: Vec<SkeletonLevel>) -> Result<Self> {
        let s = Skeleton { levels };
        s.validate(b)?;
        Ok(s)
    }

    /// Skeleton given by extremal sources: the maximal edge is the last
    /// parallel copy, the minimal edge the first. Index `n-1` holds level `n`.
    pub fn from_sources(
        b: &BratteliDiagram,
        max_source: &[Vec<usize>],
        min_source: &[Vec<usize>],
        max_vertices: &[BTreeSet<usize>],
        min_vertices: &[BTreeSet<usize>],
    ) -> Result<Self> {
        let depth = max_source.len();
        if min_source.len() != depth || max_vertices.len() != depth || min_vertices.len() != depth {
            return Err(Error::InvalidSkeleton("per-level lists differ in length".into()));
        }
        if depth > b.depth() {
            return Err(Error::InvalidSkeleton(format!(
                "skeleton has {depth} levels, diagram depth {}",
                b.depth()
            )));
        }
        let mut levels = Vec::with_capacity(depth);
        for i in 0..depth {
            let n = i + 1;
            if max_source[i].len() != b.vertex_count(n) || min_source[i].len() != b.vertex_count(n) {
                return Err(Error::InvalidSkeleton(format!("level {n}: wrong number of vertices")));
            }
            let mut max_edge = Vec::new();
            let mut min_edge = Vec::new();
            for v in 0..b.vertex_count(n) {
                let (ms, ns) = (max_source[i][v], min_source[i][v]);
                if ms >= b.vertex_count(n - 1) || ns >= b.vertex_count(n - 1) {
                    return Err(Error::InvalidSkeleton(format!("level {n}: source out of range")));
                }
                let fm = b.multiplicity(n, v, ms) as usize;
                let fn_ = b.multiplicity(n, v, ns) as usize;
                if fm == 0 || fn_ == 0 {
                    return Err(Error::InvalidSkeleton(format!(
                        "level {n}, vertex {v}: no edge from the designated source"
                    )));
                }
                max_edge.push(EdgeId::new(n, v, ms, fm - 1));
                min_edge.push(EdgeId::new(n, v, ns, 0));
            }
            levels.push(SkeletonLevel {
                max_edge,
                min_edge,
                max_vertices: max_vertices[i].clone(),
                min_vertices: min_vertices[i].clone(),
            });
        }
        Self::new(b, levels)
    }

    /// Stationary skeleton on a stationary diagram: `tau[v]`, `mu[v]` are the
    /// extremal sources into `v` at every level from 2 on and the extremal
    /// vertex sets are the periodic points of `tau` and `mu`.
    pub fn stationary(b: &BratteliDiagram, tau: &[usize], mu: &[usize]) -> Result<Self> {
        let d = b.vertex_count(1);
        if tau.len() != d || mu.len() != d {
            return Err(Error::InvalidSkeleton("tau/mu length differs from |V|".into()));
        }
        let per_t = periodic_points(tau);
        let per_m = periodic_points(mu);
        let mut max_s = Vec::new();
        let mut min_s = Vec::new();
        for n in 1..=b.depth() {
            if n == 1 {
                max_s.push(vec![0; d]);
                min_s.push(vec![0; d]);
            } else {
                max_s.push(tau.to_vec());
                min_s.push(mu.to_vec());
            }
        }
        let depth = b.depth();
        Self::from_sources(b, &max_s, &min_s, &vec![per_t; depth], &vec![per_m; depth])
    }

    /// Skeleton read directly off an order, with the extremal vertex sets
    /// given explicitly.
    pub fn from_order(
        b: &BratteliDiagram,
        omega: &DiagramOrder,
        max_vertices: Vec<BTreeSet<usize>>,
        min_vertices: Vec<BTreeSet<usize>>,
    ) -> Result<Self> {
        let levels = (1..=omega.depth())
            .map(|n| SkeletonLevel {
                max_edge: (0..b.vertex_count(n)).map(|v| omega.max_edge(n, v)).collect(),
                min_edge: (0..b.vertex_count(n)).map(|v| omega.min_edge(n, v)).collect(),
                max_vertices: max_vertices[n - 1].clone(),
                min_vertices: min_vertices[n - 1].clone(),
            })
            .collect();
        Self::new(b, levels)
    }

    pub fn validate(&self, b: &BratteliDiagram) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSkeleton(msg));
        if self.levels.is_empty() {
            return bad("no levels".into());
        }
        if self.depth() > b.depth() {
            return bad(format!("skeleton depth {} exceeds diagram depth {}", self.depth(), b.depth()));
        }
        for n in 1..=self.depth() {
            let lv = &self.levels[n - 1];
            let k = b.vertex_count(n);
            if lv.max_edge.len() != k || lv.min_edge.len() != k {
                return bad(format!("level {n}: expected {k} extremal edges"));
            }
            if lv.max_vertices.is_empty() || lv.min_vertices.is_empty() {
                return bad(format!("level {n}: empty extremal vertex set"));
            }
            if lv.max_vertices.iter().chain(lv.min_vertices.iter()).any(|&v| v >= k) {
                return bad(format!("level {n}: extremal vertex out of range"));
            }
            let prev_max = self.max_vertices(n - 1);
            let prev_min = self.min_vertices(n - 1);
            for v in 0..k {
                let (em, en) = (lv.max_edge[v], lv.min_edge[v]);
                b.check_edge(&em).map_err(|e| Error::InvalidSkeleton(e.to_string()))?;
                b.check_edge(&en).map_err(|e| Error::InvalidSkeleton(e.to_string()))?;
                if em.range != v || en.range != v || em.level != n || en.level != n {
                    return bad(format!("level {n}, vertex {v}: extremal edge has wrong range"));
                }
                if !prev_max.contains(&em.source) {
                    return bad(format!(
                        "level {n}, vertex {v}: maximal edge source {} is not a maximal vertex",
                        em.source
                    ));
                }
                if !prev_min.contains(&en.source) {
                    return bad(format!(
                        "level {n}, vertex {v}: minimal edge source {} is not a minimal vertex",
                        en.source
                    ));
                }
                if em == en && b.in_degree(n, v) >= 2 {
                    return bad(format!("level {n}, vertex {v}: maximal and minimal edge coincide"));
                }
            }
        }
        for n in 1..self.depth().saturating_sub(1) {
            let up = &self.levels[n];
            for &x in &self.levels[n - 1].max_vertices {
                if !up.max_vertices.iter().any(|&v| up.max_edge[v].source == x) {
                    return bad(format!("maximal vertex {x} at level {n} does not extend upwards"));
                }
            }
            for &x in &self.levels[n - 1].min_vertices {
                if !up.min_vertices.iter().any(|&v| up.min_edge[v].source == x) {
                    return bad(format!("minimal vertex {x} at level {n} does not extend upwards"));
                }
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &SkeletonLevel {
        &self.levels[n - 1]
    }

    pub fn max_edge(&self, n: usize, v: usize) -> EdgeId {
        self.levels[n - 1].max_edge[v]
    }

    pub fn min_edge(&self, n: usize, v: usize) -> EdgeId {
        self.levels[n - 1].min_edge[v]
    }

    /// `s(ẽ_v)` for `v` in `V_n`.
    pub fn tau(&self, n: usize, v: usize) -> usize {
        self.levels[n - 1].max_edge[v].source
    }

    /// `s(ē_v)` for `v` in `V_n`.
    pub fn mu(&self, n: usize, v: usize) -> usize {
        self.levels[n - 1].min_edge[v].source
    }

    pub fn max_vertices(&self, n: usize) -> BTreeSet<usize> {
        if n == 0 {
            root_set()
        } else {
            self.levels[n - 1].max_vertices.clone()
        }
    }

    pub fn min_vertices(&self, n: usize) -> BTreeSet<usize> {
        if n == 0 {
            root_set()
        } else {
            self.levels[n - 1].min_vertices.clone()
        }
    }

    /// Follow maximal edges from `v` at level `top` down to level `n`.
    pub fn tau_chain(&self, top: usize, v: usize, n: usize) -> usize {
        (n + 1..=top).rev().fold(v, |x, t| self.tau(t, x))
    }

    pub fn mu_chain(&self, top: usize, v: usize, n: usize) -> usize {
        (n + 1..=top).rev().fold(v, |x, t| self.mu(t, x))
    }

    /// `W_ṽ(n)`: vertices of `V_n` whose maximal edge comes from `ṽ`.
    pub fn max_fibre(&self, n: usize, tv: usize) -> Vec<usize> {
        (0..self.levels[n - 1].max_edge.len()).filter(|&w| self.tau(n, w) == tv).collect()
    }

    /// `W'_v̄(n)`.
    pub fn min_fibre(&self, n: usize, bv: usize) -> Vec<usize> {
        (0..self.levels[n - 1].min_edge.len()).filter(|&w| self.mu(n, w) == bv).collect()
    }

    pub fn truncate(&self, depth: usize) -> Skeleton {
        Skeleton { levels: self.levels[..depth].to_vec() }
    }
}

/// Level maps `σ_n` for `n = 0..=depth`, `σ_0` being the root map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    levels: Vec<BTreeMap<usize, BTreeSet<usize>>>,
}

impl Correspondence {
    /// `levels[n]` is `σ_n`; a missing level 0 entry is filled with the root map.
    pub fn new(mut levels: Vec<BTreeMap<usize, BTreeSet<usize>>>) -> Self {
        if levels.is_empty() || levels[0].is_empty() {
            if levels.is_empty() {
                levels.push(BTreeMap::new());
            }
            levels[0] = [(0, root_set())].into_iter().collect();
        }
        Correspondence { levels }
    }

    /// The same map at every level `1..=depth`.
    pub fn stationary(map: &BTreeMap<usize, BTreeSet<usize>>, depth: usize) -> Self {
        let mut levels = vec![BTreeMap::new()];
        for _ in 1..=depth {
            levels.push(map.clone());
        }
        Self::new(levels)
    }

    pub fn from_point_map(map: &[(usize, usize)], depth: usize) -> Self {
        let m = map.iter().map(|&(a, b)| (a, [b].into_iter().collect())).collect();
        Self::stationary(&m, depth)
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &BTreeMap<usize, BTreeSet<usize>> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[BTreeMap<usize, BTreeSet<usize>>] {
        &self.levels
    }

    pub fn sigma(&self, n: usize, tv: usize) -> BTreeSet<usize> {
        self.levels.get(n).and_then(|m| m.get(&tv)).cloned().unwrap_or_default()
    }

    pub fn contains(&self, n: usize, tv: usize, bv: usize) -> bool {
        self.levels
            .get(n)
            .and_then(|m| m.get(&tv))
            .is_some_and(|s| s.contains(&bv))
    }

    /// `σ_n` as a point map, if every image is a singleton.
    pub fn point_map(&self, n: usize) -> Option<BTreeMap<usize, usize>> {
        let m = self.levels.get(n)?;
        m.iter()
            .map(|(&k, v)| if v.len() == 1 { Some((k, *v.iter().next().unwrap())) } else { None })
            .collect()
    }

    pub fn truncate(&self, depth: usize) -> Correspondence {
        Correspondence { levels: self.levels[..=depth].to_vec() }
    }
}

/// `σ_n` read off the two-letter words of the level-`n` language.
pub fn sigma_from_order(
    b: &BratteliDiagram,
    omega: &DiagramOrder,
    skeleton: &Skeleton,
    n: usize,
    horizon: usize,
) -> Result<BTreeMap<usize, BTreeSet<usize>>> {
    if n == 0 {
        return Ok([(0, root_set())].into_iter().collect());
    }
    let lang = level_language(b, omega, n, horizon, 2)?;
    let maxv = skeleton.max_vertices(n);
    let minv = skeleton.min_vertices(n);
    let mut out: BTreeMap<usize, BTreeSet<usize>> = maxv.iter().map(|&v| (v, BTreeSet::new())).collect();
    for (x, y) in lang.two_letter() {
        if maxv.contains(&x) && minv.contains(&y) {
            out.get_mut(&x).unwrap().insert(y);
        }
    }
    Ok(out)
}

/// `σ_n` for every `n` below the horizon.
pub fn correspondence_from_order(
    b: &BratteliDiagram,
    omega: &DiagramOrder,
    skeleton: &Skeleton,
    horizon: usize,
) -> Result<Correspondence> {
    let mut levels = Vec::with_capacity(horizon);
    for n in 0..horizon {
        levels.push(sigma_from_order(b, omega, skeleton, n, horizon)?);
    }
    Ok(Correspondence::new(levels))
}

/// Result of [`skeleton_from_order`].
#[derive(Clone, Debug)]
pub struct ExtractedSkeleton {
    pub levels: Vec<usize>,
    pub diagram: BratteliDiagram,
    pub order: DiagramOrder,
    pub skeleton: Skeleton,
}

fn image_down(step: impl Fn(usize, usize) -> usize, top: usize, set: &BTreeSet<usize>, n: usize) -> BTreeSet<usize> {
    set.iter().map(|&v| (n + 1..=top).rev().fold(v, |x, t| step(t, x))).collect()
}

/// Telescopes until every maximal (minimal) edge leaves a maximal (minimal)
/// vertex. Extremal vertices at a level are those reached from the top level
/// by extremal edge chains, so the top level itself is taken whole.
pub fn skeleton_from_order(b: &BratteliDiagram, omega: &DiagramOrder) -> Result<ExtractedSkeleton> {
    let top = b.depth();
    if top < 2 {
        return Err(Error::DepthTooSmall("need depth at least 2, reached level 1".into()));
    }
    let all_top: BTreeSet<usize> = (0..b.vertex_count(top)).collect();
    let tau = |t: usize, x: usize| omega.max_edge(t, x).source;
    let mu = |t: usize, x: usize| omega.min_edge(t, x).source;
    let max_at = |c: usize| image_down(tau, top, &all_top, c);
    let min_at = |c: usize| image_down(mu, top, &all_top, c);

    let mut levels = vec![0, 1];
    let mut c = 1;
    while c < top {
        let (tc, mc) = (max_at(c), min_at(c));
        let mut next = None;
        for m in c + 1..=top {
            let all_m: BTreeSet<usize> = (0..b.vertex_count(m)).collect();
            if image_down(tau, m, &all_m, c) == tc && image_down(mu, m, &all_m, c) == mc {
                next = Some(m);
                break;
            }
        }
        match next {
            Some(m) => {
                levels.push(m);
                c = m;
            }
            None => {
                if levels.len() == 2 {
                    return Err(Error::DepthTooSmall(format!("no telescoping step found from level {c}")));
                }
                break;
            }
        }
    }
    let t = telescope(b, &levels)?;
    let order = telescope_order(b, omega, &t)?;
    let maxv: Vec<BTreeSet<usize>> = levels[1..].iter().map(|&l| max_at(l)).collect();
    let minv: Vec<BTreeSet<usize>> = levels[1..].iter().map(|&l| min_at(l)).collect();
    let skeleton = Skeleton::from_order(&t.diagram, &order, maxv, minv)?;
    Ok(ExtractedSkeleton { levels, diagram: t.diagram, order, skeleton })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositionFailure {
    pub upper_level: usize,
    pub lower_level: usize,
    pub max_vertex: usize,
    pub min_vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreadCount {
    pub vertex: usize,
    pub compatible: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub depth: usize,
    pub shape_errors: Vec<String>,
    /// `(level, uncovered minimal vertices)`.
    pub covering_failures: Vec<(usize, Vec<usize>)>,
    pub composition_failures: Vec<CompositionFailure>,
    /// Minimal chains compatible with each maximal chain ending at the top level.
    pub max_threads: Vec<ThreadCount>,
    pub min_threads: Vec<ThreadCount>,
    pub threads_exist: bool,
    pub unique_up_to_depth: bool,
    pub point_map_from: Option<usize>,
    pub assumptions: Vec<String>,
}

impl CorrespondenceReport {
    pub fn ok(&self) -> bool {
        self.shape_errors.is_empty()
            && self.covering_failures.is_empty()
            && self.composition_failures.is_empty()
            && self.threads_exist
    }
}

pub fn validate_correspondence(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
) -> CorrespondenceReport {
    let depth = sigma.depth().min(skeleton.depth()).min(b.depth());
    let mut shape_errors = Vec::new();
    let mut covering_failures = Vec::new();
    for n in 0..=depth {
        let maxv = skeleton.max_vertices(n);
        let minv = skeleton.min_vertices(n);
        let map = sigma.level(n);
        let keys: BTreeSet<usize> = map.keys().copied().collect();
        if keys != maxv {
            shape_errors.push(format!("level {n}: sigma is defined on {keys:?}, maximal vertices are {maxv:?}"));
        }
        let mut covered = BTreeSet::new();
        for (tv, img) in map {
            if img.is_empty() {
                shape_errors.push(format!("level {n}: empty image of {tv}"));
            }
            for bv in img {
                if !minv.contains(bv) {
                    shape_errors.push(format!("level {n}: image {bv} of {tv} is not a minimal vertex"));
                }
            }
            covered.extend(img.iter().copied());
        }
        let missing: Vec<usize> = minv.difference(&covered).copied().collect();
        if !missing.is_empty() {
            covering_failures.push((n, missing));
        }
    }

    let mut composition_failures = Vec::new();
    for top in 1..=depth {
        for (&tv, img) in sigma.level(top) {
            for &bv in img {
                for n in 0..top {
                    let lt = skeleton.tau_chain(top, tv, n);
                    let lb = skeleton.mu_chain(top, bv, n);
                    if !sigma.contains(n, lt, lb) {
                        composition_failures.push(CompositionFailure {
                            upper_level: top,
                            lower_level: n,
                            max_vertex: tv,
                            min_vertex: bv,
                        });
                    }
                }
            }
        }
    }

    let compatible = |tv: usize, bv: usize| {
        (1..=depth).all(|n| sigma.contains(n, skeleton.tau_chain(depth, tv, n), skeleton.mu_chain(depth, bv, n)))
    };
    let maxv = skeleton.max_vertices(depth);
    let minv = skeleton.min_vertices(depth);
    let max_threads: Vec<ThreadCount> = maxv
        .iter()
        .map(|&tv| ThreadCount { vertex: tv, compatible: minv.iter().filter(|&&bv| compatible(tv, bv)).count() })
        .collect();
    let min_threads: Vec<ThreadCount> = minv
        .iter()
        .map(|&bv| ThreadCount { vertex: bv, compatible: maxv.iter().filter(|&&tv| compatible(tv, bv)).count() })
        .collect();
    let threads_exist = max_threads.iter().chain(min_threads.iter()).all(|t| t.compatible >= 1);
    let unique_up_to_depth = max_threads.iter().chain(min_threads.iter()).all(|t| t.compatible == 1);

    let mut point_map_from = None;
    for n in (1..=depth).rev() {
        if sigma.point_map(n).is_some() {
            point_map_from = Some(n);
        } else {
            break;
        }
    }

    CorrespondenceReport {
        depth,
        shape_errors,
        covering_failures,
        composition_failures,
        max_threads,
        min_threads,
        threads_exist,
        unique_up_to_depth,
        point_map_from,
        assumptions: vec![
            "extremal path sets are assumed closed and nowhere dense".into(),
            "thread uniqueness is checked only up to the given depth".into(),
        ],
    }
}

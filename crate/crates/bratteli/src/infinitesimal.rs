//! Infinitesimal vectors of a perfect order: construction, propagation,
//! independence and the pairing with the Perron vector.

use serde::Serialize;

use crate::diagram::{BratteliDiagram, IncidenceMatrix};
use crate::error::{Error, Result};
use crate::linalg;
use crate::skeleton::{Correspondence, Skeleton};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfinitesimalVector {
    pub base_level: usize,
    /// `ṽ*` in `Ṽ_{n-1}`.
    pub max_vertex: usize,
    /// The single element of `σ_{n-1}(ṽ*)`.
    pub min_vertex: usize,
    pub offset: usize,
    /// Indexed by `V_{n+k}`, from the path-count formula.
    pub entries: Vec<i64>,
    /// Indexed by `V_{n+k}`, from where the extremal paths into `v` start.
    pub trichotomy: Vec<i64>,
    pub formulas_agree: bool,
}

impl InfinitesimalVector {
    pub fn level(&self) -> usize {
        self.base_level + self.offset
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow(format!("{x} does not fit in 64 bits")))
}

/// `ε_{ṽ*}^{(n+k)}`, both ways. The two agree whenever the sums-of-entries
/// relation holds for `ṽ*` between levels `n` and `n+k`.
pub fn epsilon_vector(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
    max_vertex: usize,
    k: usize,
) -> Result<InfinitesimalVector> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidLevels(format!("base level {n} and offset {k} must be positive")));
    }
    let top = n + k;
    if top > b.depth() || top > skeleton.depth() {
        return Err(Error::LevelOutOfRange { level: top, depth: b.depth().min(skeleton.depth()) });
    }
    if !skeleton.max_vertices(n - 1).contains(&max_vertex) {
        return Err(Error::NotApplicable(format!(
            "{} is not a maximal vertex at level {}",
            b.label(n - 1, max_vertex),
            n - 1
        )));
    }
    let img = sigma.sigma(n - 1, max_vertex);
    if img.len() != 1 {
        return Err(Error::NotApplicable(format!(
            "sigma_{}({}) has {} elements, expected one",
            n - 1,
            b.label(n - 1, max_vertex),
            img.len()
        )));
    }
    let min_vertex = *img.iter().next().unwrap();
    let w_max = skeleton.max_fibre(n, max_vertex);
    let w_min = skeleton.min_fibre(n, min_vertex);
    let p = b.product(n, top)?;
    let mut entries = Vec::with_capacity(p.rows());
    let mut trichotomy = Vec::with_capacity(p.rows());
    for v in 0..p.rows() {
        let plus: i128 = w_max.iter().map(|&w| p.get(v, w) as i128).sum();
        let minus: i128 = w_min.iter().map(|&w| p.get(v, w) as i128).sum();
        entries.push(to_i64(plus - minus)?);
        let hi = i64::from(w_max.contains(&skeleton.tau_chain(top, v, n)));
        let lo = i64::from(w_min.contains(&skeleton.mu_chain(top, v, n)));
        trichotomy.push(hi - lo);
    }
    let formulas_agree = entries == trichotomy;
    Ok(InfinitesimalVector { base_level: n, max_vertex, min_vertex, offset: k, entries, trichotomy, formulas_agree })
}

/// `ε_ṽ^{(n+k)}` for every `ṽ` in `Ṽ_{n-1}`.
pub fn epsilon_family(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
    k: usize,
) -> Result<Vec<InfinitesimalVector>> {
    if n == 0 {
        return Err(Error::InvalidLevels("base level must be positive".into()));
    }
    skeleton
        .max_vertices(n - 1)
        .into_iter()
        .map(|v| epsilon_vector(b, skeleton, sigma, n, v, k))
        .collect()
}

pub fn apply_matrix(f: &IncidenceMatrix, eps: &[i64]) -> Result<Vec<i64>> {
    if eps.len() != f.cols() {
        return Err(Error::Dimension(format!("vector of length {} against {} columns", eps.len(), f.cols())));
    }
    (0..f.rows())
        .map(|r| to_i64(f.row(r).iter().zip(eps).map(|(&a, &x)| a as i128 * x as i128).sum()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropagationStep {
    /// Level of the vector that `F_level` is applied to.
    pub level: usize,
    pub pass: bool,
    pub offending_row: Option<usize>,
    pub expected: Vec<i64>,
    pub found: Vec<i64>,
}

/// Compares `F · eps` with `expected` row by row.
pub fn propagate_vector(f: &IncidenceMatrix, level: usize, eps: &[i64], expected: &[i64]) -> Result<PropagationStep> {
    let found = apply_matrix(f, eps)?;
    if found.len() != expected.len() {
        return Err(Error::Dimension(format!("{} rows against {} expected entries", found.len(), expected.len())));
    }
    let offending_row = (0..found.len()).find(|&r| found[r] != expected[r]);
    Ok(PropagationStep { level, pass: offending_row.is_none(), offending_row, expected: expected.to_vec(), found })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropagationReport {
    pub base_level: usize,
    pub max_vertex: usize,
    pub steps: Vec<PropagationStep>,
    pub pass: bool,
}

/// `F_{n+k} ε^{(n+k)} = ε^{(n+k+1)}` for every offset the depth allows,
/// with both sides taken from the extremal-path description.
pub fn propagate_check(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    n: usize,
    max_vertex: usize,
) -> Result<PropagationReport> {
    let top = b.depth().min(skeleton.depth());
    if n + 2 > top {
        return Err(Error::DepthTooSmall(format!("need depth {} for one propagation step", n + 2)));
    }
    let mut steps = Vec::new();
    let mut cur = epsilon_vector(b, skeleton, sigma, n, max_vertex, 1)?;
    for k in 1..top - n {
        let next = epsilon_vector(b, skeleton, sigma, n, max_vertex, k + 1)?;
        steps.push(propagate_vector(b.incidence_matrix(n + k)?, n + k, &cur.trichotomy, &next.trichotomy)?);
        cur = next;
    }
    let pass = steps.iter().all(|s| s.pass);
    Ok(PropagationReport { base_level: n, max_vertex, steps, pass })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub vectors: usize,
    pub rank: usize,
    /// Coprime integer coefficients of a vanishing combination.
    pub dependency: Option<Vec<i64>>,
}

pub fn independence_rank(vectors: &[Vec<i64>]) -> Result<RankReport> {
    if let Some(first) = vectors.first() {
        if vectors.iter().any(|v| v.len() != first.len()) {
            return Err(Error::Dimension("vectors live at different levels".into()));
        }
    }
    let rank = linalg::rank(vectors);
    let dependency = match linalg::integer_dependency(vectors) {
        Some(d) => Some(
            linalg::to_i64_vec(&d).ok_or_else(|| Error::Overflow("dependency coefficients exceed 64 bits".into()))?,
        ),
        None => None,
    };
    Ok(RankReport { vectors: vectors.len(), rank, dependency })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronReport {
    pub perron: Vec<f64>,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub residual: f64,
    pub pairing: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub const POWER_TOLERANCE: f64 = 1e-12;
pub const PAIRING_TOLERANCE: f64 = 1e-9;

/// Normalised Perron vector of `F^T` by power iteration from the uniform
/// vector, and its pairing with `eps`.
pub fn perron_pairing_check(b: &BratteliDiagram, eps: &[i64]) -> Result<PerronReport> {
    let f = b
        .stationary_block()
        .ok_or_else(|| Error::NotApplicable("diagram is not stationary".into()))?;
    if !f.is_positive() {
        return Err(Error::NotApplicable("stationary block is not strictly positive".into()));
    }
    let d = f.rows();
    if eps.len() != d {
        return Err(Error::Dimension(format!("vector of length {} against {d} vertices", eps.len())));
    }
    let mut p = vec![1.0 / d as f64; d];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut eigenvalue = 0.0;
    while residual > POWER_TOLERANCE && iterations < 100_000 {
        let mut q: Vec<f64> = (0..d).map(|c| (0..d).map(|r| f.get(r, c) as f64 * p[r]).sum()).collect();
        let s: f64 = q.iter().sum();
        q.iter_mut().for_each(|x| *x /= s);
        residual = q.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        eigenvalue = s;
        p = q;
        iterations += 1;
    }
    let pairing: f64 = p.iter().zip(eps).map(|(a, &e)| a * e as f64).sum();
    Ok(PerronReport {
        perron: p,
        eigenvalue,
        iterations,
        residual,
        pairing,
        tolerance: PAIRING_TOLERANCE,
        pass: pairing.abs() <= PAIRING_TOLERANCE && residual <= POWER_TOLERANCE,
    })
}

/// A maximal chain read down from `top_vertex` at `top_level`, with the
/// base level its vector is built at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub top_level: usize,
    pub top_vertex: usize,
    pub base_level: usize,
}

/// Smallest base `n` such that `σ_m` is a point at the chain's vertex for
/// every `m` from `n-1` up to the top.
pub fn chain_base(skeleton: &Skeleton, sigma: &Correspondence, top_level: usize, top_vertex: usize) -> Option<usize> {
    let top = top_level.min(sigma.depth());
    let mut base = None;
    for m in (0..=top).rev() {
        let v = skeleton.tau_chain(top_level, top_vertex, m);
        if sigma.sigma(m, v).len() == 1 {
            base = Some(m + 1);
        } else {
            break;
        }
    }
    base
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub common_level: usize,
    pub vectors: Vec<InfinitesimalVector>,
    pub rank: RankReport,
}

/// One vector per chain, all taken at the level just above the highest base.
pub fn countable_family(
    b: &BratteliDiagram,
    skeleton: &Skeleton,
    sigma: &Correspondence,
    chains: &[Chain],
) -> Result<FamilyReport> {
    if chains.is_empty() {
        return Err(Error::NotApplicable("no chains given".into()));
    }
    let common = chains.iter().map(|c| c.base_level).max().unwrap() + 1;
    let mut vectors = Vec::with_capacity(chains.len());
    for (i, c) in chains.iter().enumerate() {
        if c.base_level == 0 || c.top_level + 1 < c.base_level {
            return Err(Error::InvalidLevels(format!("chain {i}: base {} above top {}", c.base_level, c.top_level)));
        }
        b.check_vertex(c.top_level, c.top_vertex)?;
        let v = skeleton.tau_chain(c.top_level, c.top_vertex, c.base_level - 1);
        let eps = epsilon_vector(b, skeleton, sigma, c.base_level, v, common - c.base_level)
            .map_err(|e| Error::NotApplicable(format!("chain {i}: {e}")))?;
        vectors.push(eps);
    }
    let rank = independence_rank(&vectors.iter().map(|v| v.entries.clone()).collect::<Vec<_>>())?;
    Ok(FamilyReport { common_level: common, vectors, rank })
}

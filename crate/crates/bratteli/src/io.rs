//! JSON file formats. See `docs/formats.md` for the schemas.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diagram::{BratteliDiagram, Count, DiagramSpec, IncidenceMatrix, build_diagram};
use crate::error::{Error, Result};
use crate::ordering::DiagramOrder;
use crate::skeleton::{Correspondence, Skeleton};
use crate::synth::BalanceDecomposition;

pub const FORMAT_VERSION: u32 = 1;

/// A vertex named by index or by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Letter {
    Index(usize),
    Label(String),
}

/// A source word: indices, a list of labels, or a string of labels
/// (one character each, or separated by spaces).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Word {
    Text(String),
    Letters(Vec<Letter>),
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported format version {v}")));
    }
    Ok(())
}

fn resolve(b: &BratteliDiagram, level: usize, l: &Letter) -> Result<usize> {
    match l {
        Letter::Index(i) => {
            b.check_vertex(level, *i)?;
            Ok(*i)
        }
        Letter::Label(s) => b
            .labels(level)
            .iter()
            .position(|x| x == s)
            .ok_or_else(|| Error::Parse(format!("no vertex labelled {s:?} at level {level}"))),
    }
}

fn resolve_word(b: &BratteliDiagram, level: usize, w: &Word) -> Result<Vec<usize>> {
    match w {
        Word::Letters(ls) => ls.iter().map(|l| resolve(b, level, l)).collect(),
        Word::Text(s) => {
            let parts: Vec<String> = if s.contains(char::is_whitespace) {
                s.split_whitespace().map(str::to_string).collect()
            } else {
                s.chars().map(|c| c.to_string()).collect()
            };
            parts.iter().map(|p| resolve(b, level, &Letter::Label(p.clone()))).collect()
        }
    }
}

fn single_char_labels(b: &BratteliDiagram, level: usize) -> bool {
    b.labels(level).iter().all(|l| l.chars().count() == 1)
}

fn emit_word(b: &BratteliDiagram, level: usize, w: &[usize]) -> Word {
    if single_char_labels(b, level) {
        Word::Text(w.iter().map(|&x| b.label(level, x)).collect())
    } else {
        Word::Letters(w.iter().map(|&x| Letter::Index(x)).collect())
    }
}

fn emit_letter(b: &BratteliDiagram, level: usize, x: usize) -> Letter {
    Letter::Label(b.label(level, x))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeListFile {
    pub vertex_counts: Vec<usize>,
    /// Per level `1..=depth`, `[source, range]` pairs.
    pub edges: Vec<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramFile {
    pub version: u32,
    /// Repeating block; the diagram is the root column followed by copies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<Vec<Vec<Count>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    /// `F_0, F_1, ...`; if the first matrix has more than one column it is
    /// read as `F_1` and a root column of ones is put in front.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<Count>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<EdgeListFile>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub stationary: bool,
    /// Labels used at every level from 1 on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_labels: Option<Vec<Vec<String>>>,
}

fn matrix(rows: &[Vec<Count>]) -> Result<IncidenceMatrix> {
    IncidenceMatrix::from_rows(rows.to_vec())
}

impl DiagramFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn build(&self) -> Result<BratteliDiagram> {
        check_version(self.version)?;
        let given = [self.block.is_some(), self.matrices.is_some(), self.edges.is_some()];
        if given.iter().filter(|&&x| x).count() != 1 {
            return Err(Error::Parse("exactly one of block, matrices, edges must be given".into()));
        }
        let mut b = if let Some(block) = &self.block {
            let depth = self.depth.ok_or_else(|| Error::Parse("block needs a depth".into()))?;
            BratteliDiagram::stationary(matrix(block)?, depth)?
        } else if let Some(ms) = &self.matrices {
            let mut mats = ms.iter().map(|m| matrix(m)).collect::<Result<Vec<_>>>()?;
            if mats.first().is_some_and(|m| m.cols() > 1) {
                mats.insert(0, IncidenceMatrix::ones_column(mats[0].cols()));
            }
            let b = build_diagram(&DiagramSpec::Matrices { matrices: mats, stationary: self.stationary })?;
            match self.depth {
                Some(d) if b.is_stationary() => b.extend_to(d)?,
                _ => b,
            }
        } else {
            let e = self.edges.as_ref().unwrap();
            build_diagram(&DiagramSpec::Edges {
                vertex_counts: e.vertex_counts.clone(),
                edges: e.edges.clone(),
                stationary: self.stationary,
            })?
        };
        if let Some(l) = &self.labels {
            let refs: Vec<&str> = l.iter().map(String::as_str).collect();
            b = b.with_uniform_labels(&refs)?;
        }
        if let Some(ls) = &self.level_labels {
            b = b.with_labels(ls.clone())?;
        }
        Ok(b)
    }

    pub fn from_diagram(b: &BratteliDiagram) -> Self {
        let uniform = (2..=b.depth()).all(|n| b.labels(n) == b.labels(1));
        let (labels, level_labels) = if uniform {
            (Some(b.labels(1).to_vec()), None)
        } else {
            (None, Some(b.all_labels().to_vec()))
        };
        match b.stationary_block() {
            Some(block) => DiagramFile {
                version: FORMAT_VERSION,
                block: Some(block.to_rows()),
                depth: Some(b.depth()),
                matrices: None,
                edges: None,
                stationary: false,
                labels,
                level_labels,
            },
            None => DiagramFile {
                version: FORMAT_VERSION,
                block: None,
                depth: None,
                matrices: Some(b.matrices().iter().map(|m| m.to_rows()).collect()),
                edges: None,
                stationary: false,
                labels,
                level_labels,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderFile {
    pub version: u32,
    /// Stationary order: the source word of each vertex, used from level 2 on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<Vec<Word>>,
    /// Source words per level `1..=depth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Vec<Word>>>,
    /// Explicit edges `[source, copy]`, minimal first, per level and vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<Vec<Vec<(usize, usize)>>>>,
}

impl OrderFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn build(&self, b: &BratteliDiagram) -> Result<DiagramOrder> {
        check_version(self.version)?;
        if let Some(block) = &self.block {
            let words = block.iter().map(|w| resolve_word(b, 1, w)).collect::<Result<Vec<_>>>()?;
            return DiagramOrder::stationary(b, &words);
        }
        if let Some(levels) = &self.levels {
            let words = levels
                .iter()
                .enumerate()
                .map(|(i, lv)| lv.iter().map(|w| resolve_word(b, i, w)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            return DiagramOrder::from_source_words(b, &words);
        }
        if let Some(edges) = &self.edges {
            let order = edges
                .iter()
                .enumerate()
                .map(|(i, lv)| {
                    lv.iter()
                        .enumerate()
                        .map(|(v, es)| es.iter().map(|&(s, c)| crate::EdgeId::new(i + 1, v, s, c)).collect())
                        .collect()
                })
                .collect();
            return DiagramOrder::new(b, order);
        }
        Err(Error::Parse("order needs one of block, levels, edges".into()))
    }

    pub fn from_order(b: &BratteliDiagram, omega: &DiagramOrder) -> Self {
        let enumeration = DiagramOrder::enumeration(b);
        if b.is_stationary()
            && b.depth() >= 2
            && omega.is_stationary_from(2)
            && omega.source_words(1) == enumeration.source_words(1)
        {
            return OrderFile {
                version: FORMAT_VERSION,
                block: Some(omega.source_words(2).iter().map(|w| emit_word(b, 1, w)).collect()),
                levels: None,
                edges: None,
            };
        }
        let levels = (1..=omega.depth())
            .map(|n| omega.source_words(n).iter().map(|w| emit_word(b, n - 1, w)).collect())
            .collect();
        OrderFile { version: FORMAT_VERSION, block: None, levels: Some(levels), edges: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonLevelFile {
    pub max_source: Vec<Letter>,
    pub min_source: Vec<Letter>,
    pub max_vertices: Vec<Letter>,
    pub min_vertices: Vec<Letter>,
}

/// `[maximal vertex, [minimal vertices]]` pairs.
pub type SigmaLevelFile = Vec<(Letter, Vec<Letter>)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonFile {
    pub version: u32,
    /// Stationary skeleton: sources of extremal edges from level 2 on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<Letter>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<Letter>>,
    /// Stationary correspondence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaLevelFile>,
    /// Per-level skeleton for levels `1..=depth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<SkeletonLevelFile>>,
    /// Per-level correspondence `σ_1, σ_2, ...`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_levels: Option<Vec<SigmaLevelFile>>,
}

fn build_sigma_level(b: &BratteliDiagram, n: usize, s: &SigmaLevelFile) -> Result<BTreeMap<usize, BTreeSet<usize>>> {
    s.iter()
        .map(|(k, vs)| {
            let k = resolve(b, n, k)?;
            let vs = vs.iter().map(|v| resolve(b, n, v)).collect::<Result<BTreeSet<_>>>()?;
            Ok((k, vs))
        })
        .collect()
}

fn emit_sigma_level(b: &BratteliDiagram, n: usize, m: &BTreeMap<usize, BTreeSet<usize>>) -> SigmaLevelFile {
    m.iter()
        .map(|(&k, vs)| (emit_letter(b, n, k), vs.iter().map(|&v| emit_letter(b, n, v)).collect()))
        .collect()
}

impl SkeletonFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn build(&self, b: &BratteliDiagram) -> Result<(Skeleton, Correspondence)> {
        check_version(self.version)?;
        if let (Some(tau), Some(mu)) = (&self.tau, &self.mu) {
            let tau = tau.iter().map(|l| resolve(b, 1, l)).collect::<Result<Vec<_>>>()?;
            let mu = mu.iter().map(|l| resolve(b, 1, l)).collect::<Result<Vec<_>>>()?;
            let skel = Skeleton::stationary(b, &tau, &mu)?;
            let sigma = self
                .sigma
                .as_ref()
                .ok_or_else(|| Error::Parse("stationary skeleton needs sigma".into()))?;
            let map = build_sigma_level(b, 1, sigma)?;
            return Ok((skel, Correspondence::stationary(&map, b.depth())));
        }
        let levels = self.levels.as_ref().ok_or_else(|| Error::Parse("skeleton needs tau/mu or levels".into()))?;
        let mut max_s = Vec::new();
        let mut min_s = Vec::new();
        let mut maxv = Vec::new();
        let mut minv = Vec::new();
        for (i, l) in levels.iter().enumerate() {
            let n = i + 1;
            max_s.push(l.max_source.iter().map(|x| resolve(b, n - 1, x)).collect::<Result<Vec<_>>>()?);
            min_s.push(l.min_source.iter().map(|x| resolve(b, n - 1, x)).collect::<Result<Vec<_>>>()?);
            maxv.push(l.max_vertices.iter().map(|x| resolve(b, n, x)).collect::<Result<BTreeSet<_>>>()?);
            minv.push(l.min_vertices.iter().map(|x| resolve(b, n, x)).collect::<Result<BTreeSet<_>>>()?);
        }
        let skel = Skeleton::from_sources(b, &max_s, &min_s, &maxv, &minv)?;
        let sl = self
            .sigma_levels
            .as_ref()
            .ok_or_else(|| Error::Parse("per-level skeleton needs sigma_levels".into()))?;
        let mut maps = vec![BTreeMap::new()];
        for (i, s) in sl.iter().enumerate() {
            maps.push(build_sigma_level(b, i + 1, s)?);
        }
        Ok((skel, Correspondence::new(maps)))
    }

    pub fn stationary(b: &BratteliDiagram, tau: &[usize], mu: &[usize], sigma: &Correspondence) -> Self {
        SkeletonFile {
            version: FORMAT_VERSION,
            tau: Some(tau.iter().map(|&x| emit_letter(b, 1, x)).collect()),
            mu: Some(mu.iter().map(|&x| emit_letter(b, 1, x)).collect()),
            sigma: Some(emit_sigma_level(b, 1, sigma.level(1))),
            levels: None,
            sigma_levels: None,
        }
    }

    pub fn per_level(b: &BratteliDiagram, skeleton: &Skeleton, sigma: &Correspondence) -> Self {
        let levels = (1..=skeleton.depth())
            .map(|n| {
                let k = b.vertex_count(n);
                SkeletonLevelFile {
                    max_source: (0..k).map(|v| emit_letter(b, n - 1, skeleton.tau(n, v))).collect(),
                    min_source: (0..k).map(|v| emit_letter(b, n - 1, skeleton.mu(n, v))).collect(),
                    max_vertices: skeleton.max_vertices(n).iter().map(|&v| emit_letter(b, n, v)).collect(),
                    min_vertices: skeleton.min_vertices(n).iter().map(|&v| emit_letter(b, n, v)).collect(),
                }
            })
            .collect();
        let sigma_levels = (1..=sigma.depth()).map(|n| emit_sigma_level(b, n, sigma.level(n))).collect();
        SkeletonFile {
            version: FORMAT_VERSION,
            tau: None,
            mu: None,
            sigma: None,
            levels: Some(levels),
            sigma_levels: Some(sigma_levels),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    /// Level `n` of the cells; the target lives at `n + 1`.
    pub level: usize,
    pub target: Letter,
    /// `[w, minimal vertex, amount]`.
    pub entries: Vec<(Letter, Letter, Count)>,
}

impl DecompositionFile {
    pub fn build(&self, b: &BratteliDiagram) -> Result<BalanceDecomposition> {
        let n = self.level;
        if n == 0 {
            return Err(Error::InvalidLevels("decomposition level must be positive".into()));
        }
        b.check_level(n + 1)?;
        let u = resolve(b, n + 1, &self.target)?;
        let entries = self
            .entries
            .iter()
            .map(|(w, v, a)| Ok((resolve(b, n, w)?, resolve(b, n - 1, v)?, *a)))
            .collect::<Result<Vec<_>>>()?;
        Ok(BalanceDecomposition::new(n, u, &entries))
    }

    pub fn from_decomposition(b: &BratteliDiagram, d: &BalanceDecomposition) -> Self {
        DecompositionFile {
            level: d.level,
            target: emit_letter(b, d.level + 1, d.target),
            entries: d
                .entries
                .iter()
                .map(|e| (emit_letter(b, d.level, e.vertex), emit_letter(b, d.level - 1, e.min_vertex), e.amount))
                .collect(),
        }
    }
}

/// A worked example: a diagram and whatever structure comes with it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleFile {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub diagram: DiagramFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<OrderFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skeleton: Option<SkeletonFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionFile>,
}

#[derive(Clone, Debug)]
pub struct Bundle {
    pub name: String,
    pub diagram: BratteliDiagram,
    pub order: Option<DiagramOrder>,
    pub skeleton: Option<(Skeleton, Correspondence)>,
    pub decomposition: Option<BalanceDecomposition>,
}

impl BundleFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn build(&self) -> Result<Bundle> {
        check_version(self.version)?;
        let diagram = self.diagram.build()?;
        let order = self.order.as_ref().map(|o| o.build(&diagram)).transpose()?;
        let skeleton = self.skeleton.as_ref().map(|s| s.build(&diagram)).transpose()?;
        let decomposition = self.decomposition.as_ref().map(|d| d.build(&diagram)).transpose()?;
        Ok(Bundle { name: self.name.clone(), diagram, order, skeleton, decomposition })
    }
}

/// A diagram file or a bundle; bundles are recognised by their `diagram` key.
pub fn load_bundle(text: &str) -> Result<Bundle> {
    let value: serde_json::Value = parse(text)?;
    if value.get("diagram").is_some() {
        BundleFile::parse(text)?.build()
    } else {
        let diagram = DiagramFile::parse(text)?.build()?;
        Ok(Bundle { name: String::new(), diagram, order: None, skeleton: None, decomposition: None })
    }
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialisable report")
}

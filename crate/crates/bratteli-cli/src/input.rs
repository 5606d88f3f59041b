use std::fs;
use std::path::Path;

use bratteli::io::{BundleFile, DiagramFile, OrderFile, SkeletonFile, FORMAT_VERSION};
use bratteli::skeleton::{Correspondence, Skeleton};
use bratteli::synth::BalanceDecomposition;
use bratteli::{BratteliDiagram, DiagramOrder};

use crate::{Common, InputError};

pub struct Inputs {
    pub name: String,
    pub diagram: BratteliDiagram,
    pub order: Option<DiagramOrder>,
    pub skeleton: Option<(Skeleton, Correspondence)>,
    pub decomposition: Option<BalanceDecomposition>,
}

impl Inputs {
    pub fn order(&self) -> Result<&DiagramOrder, InputError> {
        self.order.as_ref().ok_or_else(|| InputError("an order is required (--order or a bundle with one)".into()))
    }

    pub fn skeleton(&self) -> Result<(&Skeleton, &Correspondence), InputError> {
        self.skeleton
            .as_ref()
            .map(|(s, c)| (s, c))
            .ok_or_else(|| InputError("a skeleton is required (--skeleton or a bundle with one)".into()))
    }

    /// Vertex at `level` by label, falling back to an index.
    pub fn vertex(&self, level: usize, name: &str) -> Result<usize, InputError> {
        let b = &self.diagram;
        b.check_level(level)?;
        if let Some(i) = b.labels(level).iter().position(|l| l == name) {
            return Ok(i);
        }
        let i: usize = name
            .parse()
            .map_err(|_| InputError(format!("no vertex {name:?} at level {level}")))?;
        b.check_vertex(level, i)?;
        Ok(i)
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_bundle(path: &Path) -> Result<BundleFile, InputError> {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| InputError(format!("{}: parse error: {e}", path.display())))?;
    if value.get("diagram").is_some() {
        Ok(BundleFile::parse(&text)?)
    } else {
        Ok(BundleFile {
            version: FORMAT_VERSION,
            name: String::new(),
            description: String::new(),
            diagram: DiagramFile::parse(&text)?,
            order: None,
            skeleton: None,
            decomposition: None,
        })
    }
}

/// Loads the diagram and whatever goes with it, then applies `--depth`.
/// Deeper stationary diagrams rebuild the order and skeleton from their
/// files; shallower ones truncate them.
pub fn load(common: &Common) -> Result<Inputs, InputError> {
    let path = common.diagram.as_ref().ok_or_else(|| InputError("--diagram is required".into()))?;
    let mut bundle = read_bundle(path)?;
    if let Some(p) = &common.order {
        bundle.order = Some(OrderFile::parse(&read(p)?)?);
    }
    if let Some(p) = &common.skeleton {
        bundle.skeleton = Some(SkeletonFile::parse(&read(p)?)?);
    }
    if bundle.version != FORMAT_VERSION {
        return Err(InputError(format!("unsupported format version {}", bundle.version)));
    }
    let base = bundle.diagram.build()?;
    let diagram = match common.depth {
        None => base.clone(),
        Some(d) if d <= base.depth() => base.truncate(d)?,
        Some(d) => base.extend_to(d)?,
    };
    let target = if diagram.depth() > base.depth() { &diagram } else { &base };
    let mut order = bundle.order.as_ref().map(|o| o.build(target)).transpose()?;
    let mut skeleton = bundle.skeleton.as_ref().map(|s| s.build(target)).transpose()?;
    let depth = diagram.depth();
    if depth < target.depth() {
        order = order.map(|o| o.truncate(depth.min(o.depth())));
        skeleton = skeleton.map(|(s, c)| {
            let sd = depth.min(s.depth());
            let cd = depth.min(c.depth());
            (s.truncate(sd), c.truncate(cd))
        });
    }
    let decomposition = bundle.decomposition.as_ref().map(|d| d.build(&diagram)).transpose()?;
    Ok(Inputs { name: bundle.name, diagram, order, skeleton, decomposition })
}

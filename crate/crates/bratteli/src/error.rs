use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("vertex with no outgoing edges: level {level}, vertex {vertex}")]
    NoOutgoing { level: usize, vertex: usize },
    #[error("vertex with no incoming edges: level {level}, vertex {vertex}")]
    NoIncoming { level: usize, vertex: usize },
    #[error("diagram depth must be at least 1")]
    ZeroDepth,
    #[error("level {level} out of range (depth {depth})")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("vertex {vertex} out of range at level {level}")]
    VertexOutOfRange { level: usize, vertex: usize },
    #[error("edge does not exist: {0}")]
    NoSuchEdge(String),
    #[error("invalid level list: {0}")]
    InvalidLevels(String),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("invalid skeleton: {0}")]
    InvalidSkeleton(String),
    #[error("invalid correspondence: {0}")]
    InvalidCorrespondence(String),
    #[error("depth too small: {0}")]
    DepthTooSmall(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

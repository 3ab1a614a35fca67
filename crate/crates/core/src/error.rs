use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("points must have dimension >= 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("coincident points: {0}")]
    Coincident(&'static str),
    #[error("collinear input: {0}")]
    Collinear(&'static str),
    #[error("epsilon must lie in (0, sqrt 2), got {0}")]
    InvalidEpsilon(f64),
    #[error("degenerate point set")]
    DegeneratePointSet,
    #[error("duplicate points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("{0}")]
    Unsupported(String),
    #[error("vertex count mismatch: {0} vs {1}")]
    VertexCountMismatch(usize, usize),
    #[error("arc chain does not close: gap {0:e}")]
    NotClosed(f64),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("point is not on the curve (distance {0:e})")]
    NotOnCurve(f64),
    #[error("sample carries no curve tags")]
    MissingTags,
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("empty sample")]
    EmptySample,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

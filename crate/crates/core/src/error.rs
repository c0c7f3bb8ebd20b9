use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown atom `{name}`; catalog: {}", catalog.join(", "))]
    UnknownAtom { name: String, catalog: Vec<String> },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid has {nodes} nodes, above the cap of {cap}")]
    GridTooLarge { nodes: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("function has an empty domain (all values +inf)")]
    DomainEmpty,

    #[error("function is improper: {0}")]
    Improper(String),

    #[error("function is not convex on the grid (first violation at node {node})")]
    NonConvex { node: usize },

    #[error("lambda must be strictly positive, got {0}")]
    InvalidLambda(f64),

    #[error("{0}: widen the grid")]
    WidenGrid(String),

    #[error("incompatible grid geometry: {0}")]
    Geometry(String),

    #[error("query point {0:?} lies outside the grid box")]
    OutsideGrid(Vec<f64>),

    #[error("empty subdifferential at node {0}")]
    EmptySubdifferential(usize),

    #[error("cannot order the norms: neither p0 >= q0 nor q0 >= p0 holds on the grid")]
    Normalization,

    #[error("averaging iteration diverged at step {step}: ratio excess {excess:.3e} exceeds bound {bound:.3e}")]
    Diverged { step: usize, excess: f64, bound: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size error: N = {n} exceeds the limit {max}")]
    Size { n: usize, max: usize },

    #[error("quadrature did not reach the requested accuracy (estimate {estimate:.3e}, error {error:.3e})")]
    Accuracy { estimate: f64, error: f64 },

    #[error("empty operator graph")]
    EmptyGraph,

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

use thiserror::Error;

/// Errors raised when an input violates a documented precondition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain of {function}: {value}")]
    Domain { function: &'static str, value: f64 },

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("curve is not simple: segments {0} and {1} intersect")]
    SelfIntersection(usize, usize),

    #[error("curve orientation is negative (signed area {0}); expected counterclockwise")]
    Orientation(f64),

    #[error("near self-contact: distance {distance:.3e} below {threshold:.3e}; increase the node count above {suggested_nodes}")]
    NearContact {
        distance: f64,
        threshold: f64,
        suggested_nodes: usize,
    },

    #[error("components {0} and {1} overlap or touch")]
    Overlap(usize, usize),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("search did not terminate: {0}")]
    NotFound(String),

    #[error("malformed shape document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

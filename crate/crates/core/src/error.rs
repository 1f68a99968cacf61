use thiserror::Error;

/// Errors raised by the geometry, fuzzy-vector, sampling and walk layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: at least one point is required")]
    EmptyInput,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0}: only d >= 2 is supported")]
    UnsupportedDimension(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("halfspaces have empty intersection")]
    EmptyIntersection,

    #[error("halfspace directions do not positively span the plane; intersection is unbounded")]
    Unbounded,

    #[error("alpha or direction grids differ between operands")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("cuts are not nested: level {inner} exceeds level {outer} by {excess:e} in direction {direction}")]
    NotNested {
        outer: usize,
        inner: usize,
        direction: usize,
        excess: f64,
    },

    #[error("invalid sampler spec: {0}")]
    InvalidSpec(String),

    #[error("sampler family has no closed-form mean; estimate it instead")]
    NoClosedForm,

    #[error("degenerate variance {0:e}: normalization would divide by ~0")]
    DegenerateVariance(f64),

    #[error("insufficient samples: need {needed}, have {available}")]
    InsufficientSamples { needed: usize, available: usize },

    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

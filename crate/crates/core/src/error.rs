use thiserror::Error;

use crate::shapes::ShapeType;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("polynomial order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("mode index {index:?} outside the admissible set for order {order}")]
    IndexOutOfRange { index: Vec<usize>, order: usize },
    #[error("coordinate {0:?} lies on the collapsed singular vertex")]
    SingularPoint(Vec<f64>),
    #[error("collapsed direction {direction} uses a rule containing the singular endpoint")]
    SingularRule { direction: usize },
    #[error("degenerate element {element}: jacobian determinant {det:e}")]
    DegenerateElement { element: usize, det: f64 },
    #[error("element {element} vertices do not describe an affine image of the standard {shape:?}")]
    NotAffine { element: usize, shape: ShapeType },
    #[error("memory region has not been initialised by a write-only access")]
    NotInitialised,
    #[error("unknown memory space '{0}'")]
    UnknownSpace(String),
    #[error("field state mismatch: expected {expected}, found {found}")]
    StateMismatch { expected: &'static str, found: &'static str },
    #[error("unsupported strategy '{0}'")]
    UnsupportedStrategy(String),
    #[error("expected {expected} components, found {found}")]
    ComponentMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("lambda must be non-negative, got {0}")]
    NegativeLambda(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

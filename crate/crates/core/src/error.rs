use thiserror::Error;

/// Errors raised by the geometric predicates, the local formula, the
/// triangulation routines and the torus pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("consecutive points {0} and {1} are antipodal")]
    AntipodalPair(usize, usize),
    #[error("probe meets a codimension-two face of the filling")]
    NonGenericProbe,
    #[error("configuration type mismatch: {0}")]
    TypeMismatch(String),
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("need at least {needed} parallel quasisections, got {got}")]
    TooFewQuasisections { needed: usize, got: usize },
    #[error("marked vertices are not antipodal")]
    NotAntipodal,
    #[error("not a face of the cell: {0}")]
    NotAFace(String),
    #[error("M = {m} does not exceed the cell count {cells}")]
    MTooSmall { m: i64, cells: usize },
    #[error("ambiguous nu numbering: {0}")]
    AmbiguousNu(String),
    #[error("triangulations disagree on a shared face {0}")]
    FaceMismatch(String),
    #[error("holonomy matrices do not commute")]
    NonCommuting,
    #[error("holonomy matrix has determinant {0}, expected 1")]
    NotUnimodular(String),
    #[error("genericity retries exhausted at stage {stage}: {detail}")]
    GenericityExhausted { stage: String, detail: String },
    #[error("empty set")]
    EmptySet,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

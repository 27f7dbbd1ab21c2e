use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group mismatch: expected {expected}, found {found}")]
    SpecMismatch { expected: String, found: String },

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    #[error("index ({i}, {j}) out of range for n = {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("operation not supported for group {0}")]
    UnsupportedGroup(String),

    #[error("morphism {morphism} is not defined on group {group}")]
    UnsupportedMorphism { morphism: String, group: String },

    #[error("malformed decomposition: {0}")]
    MalformedDecomposition(String),

    #[error("non-positive input: {0}")]
    NonPositiveInput(f64),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("enumeration budget of {0} partial paths exceeded")]
    BudgetExceeded(usize),

    #[error("input is inconsistent: {0}")]
    InconsistentInput(String),

    #[error("enumeration cap exceeded: {0} sign choices (max 24)")]
    EnumerationCap(usize),

    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),

    #[error("degenerate importance weights: effective sample size {0:.3} < 10")]
    DegenerateWeights(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by chain computations. Every variant names the module that
/// detected the problem.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("groups: coefficient groups differ ({0} vs {1})")]
    GroupMismatch(String, String),

    #[error("groups: invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("{module}: dimension mismatch: {detail}")]
    DimensionMismatch { module: &'static str, detail: String },

    #[error("chains: chains live on different complexes ({0} vs {1})")]
    ComplexMismatch(String, String),

    #[error("{module}: precondition violated: {detail}")]
    Precondition { module: &'static str, detail: String },

    #[error("geometry: {0}")]
    OutOfBounds(String),

    #[error("{module}: unknown cell id {id}")]
    UnknownCell { module: &'static str, id: usize },

    #[error("{module}: simplex is not a union of grid simplices: {detail}")]
    NotOnGrid { module: &'static str, detail: String },

    #[error("flatnorm: solver did not converge within {0} pivots")]
    SolverIterationCap(usize),

    #[error("flatnorm: instance exceeds the oracle size guard ({0})")]
    SizeGuard(String),

    #[error("approx: budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("lifting: unsupported chain dimension k = {k} for d = {d}")]
    UnsupportedDimension { k: usize, d: usize },

    #[error("io: parse error: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(module: &'static str, detail: impl Into<String>) -> Error {
    Error::Precondition {
        module,
        detail: detail.into(),
    }
}

pub(crate) fn dim_mismatch(module: &'static str, detail: impl Into<String>) -> Error {
    Error::DimensionMismatch {
        module,
        detail: detail.into(),
    }
}

use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("set contains no observations")]
    EmptySet,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("simplex exceeded its iteration limit of {0} pivots")]
    IterationLimit(usize),

    #[error("problem too large for vertex enumeration ({vars} variables, {constraints} constraints)")]
    TooLarge { vars: usize, constraints: usize },

    #[error("linear program for CLIME column {0} is infeasible")]
    InfeasibleColumn(usize),

    #[error("linear program for {0} is infeasible")]
    Infeasible(&'static str),

    #[error("linear program for {0} is unbounded")]
    Unbounded(&'static str),

    #[error("training data has no sets of class {0}")]
    MissingClass(u8),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("every cell of the tuning grid failed to fit")]
    TuningFailed,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    InvalidMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pivot block is not negative definite")]
    SingularBlock,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("SDCA needs the regularizer m > 0")]
    MissingRegularizer,
    #[error("average Hessian is not positive definite")]
    NoUniqueMinimizer,
    #[error("stepsize out of range: requires {0}")]
    StepsizeOutOfRange(String),
    #[error("b out of range: requires {0}")]
    BOutOfRange(String),
    #[error("big-data condition violated: requires {0}")]
    BigDataConditionViolated(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("pivot sign violated: requires {0}")]
    PivotSignViolation(String),
    #[error("rate out of range: requires {0}")]
    RateOutOfRange(String),
    #[error("cannot build an instance of this class: {0}")]
    InfeasibleClass(String),
    #[error("trace is degenerate: {0}")]
    DegenerateTrace(String),
    #[error("trace too short: {0}")]
    InsufficientTrace(String),
    #[error("constructed certificate failed verification (max scaled eigenvalue {0:e})")]
    VerificationFailed(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

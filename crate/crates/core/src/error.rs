use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid weight sequence: {0}")]
    InvalidSequence(String),

    #[error("index {index} out of range (materialized up to {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("sequence is quasi-analytic or unsuitable for flat synthesis: {0}")]
    NotNonQuasiAnalytic(String),

    #[error("bump synthesis failed: {0}")]
    SynthesisFailed(String),

    #[error("derivative order {order} unsupported (maximum {max})")]
    OrderTooLarge { order: usize, max: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("atom rejected by admission condition: {0}")]
    NotAdmissible(String),

    #[error("dyadic arithmetic: {0}")]
    Dyadic(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("duplicate abscissa {0}")]
    DuplicateAbscissa(f64),

    #[error("degree {degree} exceeds bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },

    #[error("interpolation uniqueness violated: {0}")]
    UniquenessViolated(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("registry: {0}")]
    Registry(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),
}

pub type Result<T> = std::result::Result<T, Error>;

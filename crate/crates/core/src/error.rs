use num_bigint::BigInt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("value outside the representable floating-point range")]
    Overflow,
    #[error("operands of a same-sign addition have opposite signs")]
    SignMismatch,
    #[error("division by zero")]
    DivideByZero,
    #[error("prime sampling exhausted its rejection budget")]
    SamplingExhausted,
    #[error("duplicate prime {0} in CRT system")]
    DuplicatePrime(BigInt),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("retries exhausted in {0}")]
    RetriesExhausted(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("spectrum produced {found} values, expected {expected}")]
    ResultCountMismatch { expected: usize, found: usize },
    #[error("lifting residual left its bound at iteration {iteration}")]
    ResidualBound { iteration: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

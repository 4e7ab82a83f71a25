use thiserror::Error;

/// Errors produced by the sketching library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("tableau is not symplectic")]
    NotSymplectic,

    #[error("observable is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("observable norm {0} exceeds 1")]
    NormTooLarge(f64),

    #[error("{what} needs dense storage for {n} qubits, limit is {limit}")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("observable is not a stabilizer projector")]
    NotStabilizerProjector,

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported format version {found} (expected {expected})")]
    Version { expected: u16, found: u16 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

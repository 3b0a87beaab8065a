use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver failed to converge for a {0}x{0} matrix")]
    EigenFailure(usize),

    #[error("ground state is degenerate and cannot be disambiguated by parity")]
    AmbiguousGroundState,

    #[error("projected state has vanishing norm ({0:e})")]
    NullProjection(f64),

    #[error("no norm-kernel eigenvalue above the cutoff")]
    EmptyNaturalBasis,

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {left:?} vs {right:?}")]
    ModulusMismatch {
        left: Option<u32>,
        right: Option<u32>,
    },

    #[error("constant term is not a unit")]
    NonUnit,

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("modulus {0} exceeds 2^31")]
    ModulusTooLarge(u64),

    #[error("operation needs exact integer coefficients")]
    RequiresExact,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("theorem precondition not met: {0}")]
    PreconditionNotMet(String),

    #[error("truncation too shallow: need q^{needed}, have q^{have}")]
    TruncationTooShallow { needed: usize, have: usize },

    #[error("coefficient overflow in {0}")]
    Overflow(&'static str),

    #[error("cannot parse family selector {0:?}: {1}")]
    FamilySyntax(String, String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: format version {found} not supported (expected {expected})")]
    VersionMismatch {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("{path}: header declares depth {declared} but file holds {found} coefficients")]
    CountMismatch {
        path: PathBuf,
        declared: usize,
        found: usize,
    },

    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

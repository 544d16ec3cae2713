use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {0} is odd; covariance matrices are 2n x 2n")]
    OddDimension(usize),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid covariance matrix: {0}")]
    InvalidCovariance(String),

    #[error("mode index {index} out of range for {n_modes} mode(s)")]
    IndexOutOfRange { index: usize, n_modes: usize },

    #[error("mode index {0} listed more than once")]
    DuplicateIndex(usize),

    #[error("complex-basis matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected} modes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid operation: {0}")]
    InvalidOp(String),

    #[error("matrix is not symplectic (deviation {0:e})")]
    NotSymplectic(f64),

    #[error("state is not pure (max |nu - 1/2| = {0:e})")]
    NotPure(f64),

    #[error("eigenvalue pairing failed: {0}")]
    PairingFailure(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("unsupported mode count {0}; only 1, 2 and 3 modes are defined")]
    UnsupportedModeCount(usize),

    #[error("cross-check failure in {what}: {primary} vs {secondary}")]
    CrossCheckFailure {
        what: &'static str,
        primary: f64,
        secondary: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("audit trial {trial} (seed {seed}): {source}")]
    Trial {
        trial: u64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the command-line tool.
    ///
    /// 2 parse error, 3 invalid state, 4 audit failure (returned by the
    /// caller, not by an error), 5 unsupported mode count. Remaining
    /// classes get their own codes above 5.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::InvalidCovariance(_)
            | Error::NotHermitian(_)
            | Error::NotPure(_)
            | Error::NotPositiveDefinite
            | Error::OddDimension(_)
            | Error::NotSquare(..) => 3,
            Error::UnsupportedModeCount(_) => 5,
            Error::InvalidParameter(_)
            | Error::IndexOutOfRange { .. }
            | Error::DuplicateIndex(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidOp(_)
            | Error::NotSymplectic(_) => 6,
            Error::PairingFailure(_) | Error::CrossCheckFailure { .. } => 7,
            Error::Io(_) => 8,
            Error::Trial { source, .. } => source.exit_code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

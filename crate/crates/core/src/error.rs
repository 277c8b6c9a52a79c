use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Matrix data violates a structural invariant (shape, finiteness, dimension cap).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A caller-supplied parameter is out of its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative decomposition did not converge.
    #[error("numerical failure in {routine} (matrix hash {hash:016x})")]
    NumericalFailure { routine: &'static str, hash: u64 },

    #[error("range error: {0}")]
    Range(String),

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("parse error at line {line}, field {field}: {message}")]
    Parse {
        line: usize,
        field: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 2,
            Error::InvalidInput(_) | Error::Parse { .. } | Error::Io(_) => 3,
            Error::NumericalFailure { .. } | Error::Range(_) | Error::NotPsd { .. } => 4,
        }
    }
}

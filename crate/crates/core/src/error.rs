use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subsystem index {index} out of range for {count} subsystems")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("postselection has zero total probability")]
    UndefinedPostselection,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("incomplete instrument: {0}")]
    IncompleteInstrument(String),
    #[error("series too short: need at least {needed}, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

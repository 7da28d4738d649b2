use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("size limit exceeded: {what} = {size} > {cap}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("operands built from different algebra configurations")]
    ConfigMismatch,
    #[error("element not supported on the {expected} half")]
    WrongHalf { expected: &'static str },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("transfer operator ill defined: residual {residual:.3e}")]
    IllDefined {
        residual: f64,
        vector: Vec<num_complex::Complex64>,
    },
    #[error("state not invariant under the time shift: defect {defect:.3e}")]
    NotShiftInvariant { defect: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub const DEFAULT_SIZE_CAP: usize = 4096;

pub(crate) fn check_cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::SizeLimit { what, size, cap })
    } else {
        Ok(())
    }
}

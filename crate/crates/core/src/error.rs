use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} outside the basis window")]
    OutsideWindow { what: String },

    #[error("window too narrow: {0}")]
    WindowTooNarrow(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("operator is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("eigensolver failed to converge on a block of size {size}")]
    Eigensolver { size: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("closed form out of regime: {0}")]
    OutOfRegime(String),

    #[error("trace drift {drift:e} exceeds bound {bound:e} at t = {time} s")]
    TraceDrift { drift: f64, bound: f64, time: f64 },

    #[error("negative eigenvalue {value:e} at t = {time} s")]
    NegativeEigenvalue { value: f64, time: f64 },

    #[error("integrator step size underflow at t = {time} s")]
    StepUnderflow { time: f64 },

    #[error("singular detection time: {0}")]
    SingularTime(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Eigensolver { .. }
                | Error::TraceDrift { .. }
                | Error::NegativeEigenvalue { .. }
                | Error::StepUnderflow { .. }
                | Error::NotHermitian { .. }
                | Error::InvalidState(_)
                | Error::WindowTooNarrow(_)
                | Error::OutOfRegime(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

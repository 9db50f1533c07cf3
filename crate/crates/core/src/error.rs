use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The variants are coarse on purpose: the command-line runner maps them
/// onto exit codes (config, non-convergence, budget) and everything else is
/// an invalid-input error from the numerical layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("operator is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian (relative defect {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (defect {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("frame is not proportional to the reference operator (residual {0:.3e})")]
    NotProportional(f64),

    #[error("dimension budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: usize,
        budget: usize,
    },

    #[error("propagation did not converge at T = {t} after {steps} steps per segment")]
    NonConvergence { t: f64, steps: usize },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

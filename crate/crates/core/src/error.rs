use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("joint vector layout: length {0} is not even")]
    Layout(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("iterates became non-finite at iteration {iteration}; the Lipschitz bound is probably too small")]
    Divergence { iteration: usize },

    #[error("operation requires real-valued data")]
    UnsupportedField,

    #[error("no joint support of size <= {k_max} explains the measurements")]
    Infeasible { k_max: usize },

    #[error("sigma_2K = {sigma} is not below 0.1907; the recovery bound does not apply")]
    GuaranteeVoid { sigma: f64 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

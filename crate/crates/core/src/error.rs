use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigen-solver did not converge at grid point {index}")]
    EigenNonConvergence { index: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("singular dressed interaction: {0}")]
    Singularity(String),

    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("mean spin length vanished; squeezing parameter undefined")]
    ContrastLoss,

    #[error("config parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },

    #[error("invalid config field `{field}`: {msg}")]
    Validation { field: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), msg: msg.into() }
    }
}

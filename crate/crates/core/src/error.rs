use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Parameter outside the regime where a method applies (e.g. Bethe roots
    /// outside the gapless phase).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{context} did not converge (best residual {residual:.3e})")]
    Convergence { context: String, residual: f64 },

    #[error("capacity exceeded: {what} is {size}, limit {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("maximum sits on the grid boundary at g = {g}; widen the grid")]
    PeakOnBoundary { g: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Domain(_) | Error::PeakOnBoundary { .. } => 2,
            Error::Convergence { .. } => 3,
            Error::Capacity { .. } => 4,
            Error::Io(_) => 5,
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A transform or exponent was evaluated outside the closed right half-plane.
    #[error("argument {arg} outside the domain of {what}")]
    Domain { what: &'static str, arg: String },

    #[error("{what} failed to converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("ladder construction needs a strictly positive drift, got {drift}")]
    UnsupportedDrift { drift: f64 },

    #[error("net profit condition violated: {0}")]
    NetProfit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular kernel: psi(s1, s2) = {0:e}")]
    Singular(f64),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

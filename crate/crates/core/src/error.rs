use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid regulator: epsilon must be positive, got {0}")]
    InvalidRegulator(f64),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid detector configuration: {0}")]
    InvalidDetector(String),

    #[error("chronology violation: proper time {tau} lies outside the causal window [-{limit}, {limit}]")]
    ChronologyViolation { tau: f64, limit: f64 },

    #[error("regular part is undefined for {0}")]
    UndefinedSplit(&'static str),

    #[error(
        "quadrature failed to converge after {subdivisions} subdivisions: \
         best estimate {re:e}{im:+e}i, error bound {error:e}"
    )]
    Convergence {
        re: f64,
        im: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("invalid quadrature configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("mode sum truncated too early: {0}")]
    TailBound(String),
}

impl Error {
    /// True when the failure is numerical non-convergence rather than bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::TailBound(_))
    }
}

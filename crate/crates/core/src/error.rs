use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// The induced output chain is not unichain-aperiodic.
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("enumeration too large: {0}")]
    EnumerationTooLarge(String),

    /// Target does not factor through the channel / equilibrium structure.
    #[error("inconsistent target: {}", .cells.join("; "))]
    InconsistentTarget { cells: Vec<String> },

    #[error("memory guard: {0}")]
    MemoryGuard(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation failed: {}", .fields.join("; "))]
    Validation { fields: Vec<String> },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("occupancy total {total} exceeds truncation order {m}")]
    TruncationViolation { total: u32, m: u32 },

    #[error("index {index} out of range [0, {dim})")]
    IndexOutOfRange { index: u64, dim: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("numerical divergence: {0}")]
    Divergence(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("decode degeneracy: vacuum amplitude {0:.3e} below threshold")]
    DecodeDegeneracy(f64),

    #[error("measurement error: {0}")]
    Measurement(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code per the CLI contract: 2 for validation problems,
    /// 3 for numerical divergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter(_) | Error::Contract(_) => 2,
            Error::Divergence(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the simulation engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),

    #[error("family `{family}` is not defined in dimension {dimension}")]
    UnsupportedFamily { family: String, dimension: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample outcome does not belong to this lattice: {0}")]
    LatticeMismatch(String),

    #[error(
        "sweep curve does not bracket spanning probability 0.5 (range {low:.4}..{high:.4} in the parameter); widen the grid"
    )]
    NoBracket { low: f64, high: f64 },

    #[error("extrapolation needs at least 3 distinct lattice sizes, got {0}")]
    TooFewSizes(usize),

    #[error("stabilizer algebra: {0}")]
    Stabilizer(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("metric axiom violated: {0}")]
    Metric(String),

    #[error("point {index} has non-positive mass {mass}")]
    NonPositiveMass { index: usize, mass: f64 },

    #[error("graph is disconnected: point {0} is unreachable from point 0")]
    Disconnected(usize),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The pointwise hypothesis of the characterization pipeline does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

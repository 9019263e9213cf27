use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resonance: {0}")]
    Resonance(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("non-simple spectrum: {0}")]
    NonSimple(String),
    #[error("eigenvalue inaccurate: {0}")]
    Inaccurate(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("small-norm hypothesis violated: {0}")]
    SmallNorm(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("integrator did not converge: {0}")]
    Convergence(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// Total field vanishes at the requested point, so its phase is undefined.
    #[error("dark point: total field amplitude {amplitude:e} is below the phase threshold")]
    DarkPoint { amplitude: f64 },

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("no standing-wave intensity maxima found in the sampled region")]
    NoRings,

    #[error("time step {step:e} s exceeds the stability limit {limit:e} s")]
    StepSize { step: f64, limit: f64 },

    #[error("trajectory diverged at t = {time:e} s (|r| = {radius:e} m)")]
    Divergence { time: f64, radius: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

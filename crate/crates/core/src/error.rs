use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("frequency lattice is empty: {0}")]
    EmptyLattice(String),

    #[error("time sampling step {step:e} exceeds the admissible step {required:e}")]
    SamplingStep { step: f64, required: f64 },

    #[error("spatial grid does not cover the ball (center {center:?}, radius {radius})")]
    Coverage { center: Vec<f64>, radius: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("no admissible time: {0}")]
    NoAdmissibleTime(String),

    #[error("field support outside the annulus: atom at |xi| = {radius}")]
    OutsideAnnulus { radius: f64 },

    #[error("unsupported query: {0}")]
    Unsupported(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

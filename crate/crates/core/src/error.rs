use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("sphere constraint violated at grid point {index}: ||m| - 1| = {deviation:e}")]
    SphereViolation { index: usize, deviation: f64 },

    #[error("stereographic chart degenerates at grid point {index}: 1 + m3 = {value:e} below pole guard {guard:e}")]
    PoleProximity { index: usize, value: f64, guard: f64 },

    #[error("negative evolution time {0}")]
    NegativeTime(f64),

    #[error("time step {dt:e} exceeds stability bound {bound:e}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("instability at t = {time}: sphere deviation {deviation:e} before renormalization")]
    Instability { time: f64, deviation: f64 },

    #[error("blow-up at t = {time}: sup |u| = {sup:e} exceeds cap {cap}")]
    Blowup { time: f64, sup: f64, cap: f64 },

    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("configuration errors:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Process exit status used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Io(_) | LabError::Json(_) | LabError::Format(_) => 1,
            LabError::Instability { .. } | LabError::Blowup { .. } | LabError::StepTooLarge { .. } => 2,
            LabError::PoleProximity { .. } | LabError::SphereViolation { .. } => 3,
            LabError::Resolution(_) | LabError::UnsupportedExponent(_) => 4,
            LabError::Contract(_)
            | LabError::InvalidGrid(_)
            | LabError::GridMismatch(_)
            | LabError::NegativeTime(_) => 1,
        }
    }
}

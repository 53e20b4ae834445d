use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pulse width {pulse_width:e} s exceeds the kicking period {period:e} s")]
    PulseLongerThanPeriod { pulse_width: f64, period: f64 },

    #[error("momentum ladder truncation: tail mass {tail_mass:e} with half-width {half_width}")]
    Truncation { tail_mass: f64, half_width: usize },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("record schema: {0}")]
    Schema(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

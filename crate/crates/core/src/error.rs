use thiserror::Error;

/// Which predictive value could not be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictiveValue {
    Positive,
    Negative,
}

impl std::fmt::Display for PredictiveValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PredictiveValue::Positive => write!(f, "PPV"),
            PredictiveValue::Negative => write!(f, "NPV"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RocError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("{which} undefined: zero denominator")]
    UndefinedPredictiveValue { which: PredictiveValue },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("singular design matrix: {0}")]
    SingularDesign(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("covariate value {x} outside boundary knots [{lo}, {hi}]")]
    Extrapolation { x: f64, lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations: {detail}")]
    Convergence { iterations: usize, detail: String },

    #[error("time {t} out of range: {reason}")]
    TimeOutOfRange { t: f64, reason: String },

    #[error("invalid mixture draw: {0}")]
    InvalidDraw(String),
}

impl RocError {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            RocError::Numeric(_) | RocError::Convergence { .. } | RocError::InvalidDraw(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, RocError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(RocError::InvalidInput(msg.into()))
}

use thiserror::Error;

/// Errors raised by the walk engines and the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time index mismatch: state is at time {state_time}, step {step} expects {expected}")]
    TimeMismatch {
        state_time: usize,
        step: usize,
        expected: usize,
    },

    #[error(
        "horizon {horizon} exceeds the exact-method cap {cap}; raise the cap or use a Monte Carlo method (trajectory or siy)"
    )]
    HorizonAboveCap { horizon: usize, cap: usize },

    #[error("decoherence strength p = 0 has no measurement times; use pure evolution instead")]
    ZeroDecoherence,

    #[error("the sigma-I-Y estimator needs a coin-basis initial state, got amplitudes ({a1}, {a2})")]
    SuperposedInitialCoin { a1: String, a2: String },

    #[error("incompatible rescaling exponents {left} and {right}")]
    IncompatibleRescaling { left: f64, right: f64 },

    #[error("need more than {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, WalkError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> WalkError {
    WalkError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

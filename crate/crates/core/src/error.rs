use thiserror::Error;

/// Errors raised by model construction, pulse design and time evolution.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time {t} outside pulse support [0, {duration}]")]
    OutOfRange { t: f64, duration: f64 },

    /// The auxiliary angle reached 0 or pi/2, where the inverted pulses diverge.
    #[error("singular protocol at t = {t}: nu = {nu} gives an infinite Rabi frequency")]
    SingularProtocol { t: f64, nu: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("integrator failure at step {step} (t = {time}): {quantity} drift {drift:e} exceeds {tolerance:e}")]
    IntegratorFailure {
        step: usize,
        time: f64,
        quantity: &'static str,
        drift: f64,
        tolerance: f64,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

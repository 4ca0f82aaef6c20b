use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("unstable parameters: {0}")]
    Unstable(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("wrong tandem kind: expected {expected} second server")]
    WrongTandem { expected: &'static str },

    #[error("quadrature did not converge on [{lower}, {upper}] (estimated error {error:e})")]
    QuadratureNonConvergence { lower: f64, upper: f64, error: f64 },

    #[error("could not bracket quantile p = {p}")]
    BracketFailure { p: f64 },

    #[error("no samples")]
    EmptyInput,

    #[error("simulation clock overflowed after {packets} packets")]
    ClockOverflow { packets: u64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("input domain: {0}")]
    InputDomain(String),

    /// A caller or policy broke the operation's contract.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("singular system: {0}")]
    Singularity(String),

    /// `value_at` was asked for a time that is not a grid point.
    #[error("time {0} is not a grid point of the path")]
    Lookup(f64),

    #[error("iteration limit reached after {iterations} iterations (residual {residual:.3e})")]
    IterationLimit { iterations: usize, residual: f64 },

    /// Dinkelbach did not settle; carries the multiplier trace.
    #[error("dinkelbach did not converge; lambda trace {trace:?}")]
    Oscillation { trace: Vec<f64> },

    /// Golden-section minimum sits on the upper bracket end.
    #[error("minimum at upper bracket end {high}; raise `high`")]
    BracketExpansion { high: f64 },

    /// An internal identity failed to hold on a simulated trace.
    #[error("internal invariant: {0}")]
    Invariant(String),
}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::InputDomain(alloc::format!($($arg)*)) };
}
macro_rules! contract {
    ($($arg:tt)*) => { $crate::error::Error::Contract(alloc::format!($($arg)*)) };
}
pub(crate) use {contract, domain};

use thiserror::Error;

/// Errors raised by the exponent computations and the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain where the quantity is defined.
    #[error("{name} = {value} is out of range: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A discretized density violates one of its structural invariants.
    #[error("invalid density: {0}")]
    Density(String),

    /// The requested codebook would exceed the configured size cap.
    #[error("codebook with {requested:.3e} codewords exceeds the cap of {cap}")]
    CodebookTooLarge { requested: f64, cap: usize },

    /// A Monte Carlo estimate sits on 0 or 1, where the log terms are undefined.
    #[error("degenerate estimate: {name} = {value}")]
    DegenerateEstimate { name: &'static str, value: f64 },

    /// An iterative solver did not reach its tolerance.
    #[error("solver failure: {0}")]
    Solver(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}

use thiserror::Error;

/// Errors raised by state construction, reduction and measurement.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The requested dense representation exceeds the configured qubit cap.
    #[error("capacity exceeded: {what} needs {requested} qubits, cap is {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// A numeric invariant (hermiticity, trace, positivity, norm) failed.
    #[error("invariant violated: {invariant} (defect {defect:.3e}, tolerance {tolerance:.1e})")]
    Invariant {
        invariant: &'static str,
        defect: f64,
        tolerance: f64,
    },

    #[error("jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation exactly at a pole or logarithmic singularity.
    #[error("singular point: {0}")]
    Pole(String),

    /// Quadrature or series did not reach the requested tolerance.
    #[error("accuracy target {tol:.1e} not reached: best estimate {value} with error {err:.2e}")]
    Accuracy { tol: f64, value: Complex64, err: f64 },

    /// A limiting sequence failed to stabilize.
    #[error("no convergence: {0}")]
    Convergence(String),

    /// Incompatible grids or vector lengths.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Classical integration left the finite range; `x`, `p` hold the last
    /// valid state, reached at `t`.
    #[error("blow-up after t = {t}: |p| = {p_norm:.3e}")]
    BlowUp { t: f64, p_norm: f64, x: Vec<f64>, p: Vec<f64> },

    /// Momentum requested exactly at a critical time.
    #[error("critical time t = {0}: momentum diverges")]
    CriticalTime(f64),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

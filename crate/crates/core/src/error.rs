use thiserror::Error;

/// Errors shared by every fallible operation in the crate.
///
/// Domain violations (`Domain`, `DimensionMismatch`) indicate bad inputs;
/// the remaining variants indicate that an iterative numerical routine hit
/// its iteration cap before reaching tolerance, and carry enough state to
/// diagnose how far it got.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix or sampler dimensions are inconsistent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The continued fraction for the Bessel ratio hit its iteration cap.
    #[error("Bessel ratio continued fraction did not converge after {iterations} iterations at z = {z}")]
    RatioDiverged { z: f64, iterations: u32 },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature on [{a}, {b}] failed to reach tolerance {tol}")]
    QuadratureFailed { a: f64, b: f64, tol: f64 },

    /// An iterative solver (series, continued fraction, or bisection) hit
    /// its iteration cap.
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: u32 },

    /// Power iteration for the operator norm hit its iteration cap; `gap`
    /// is the last relative residual.
    #[error("power iteration did not converge after {iterations} iterations (last relative residual {gap:.3e})")]
    PowerIterationDiverged { iterations: u32, gap: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}

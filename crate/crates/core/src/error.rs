//! Crate error type.
//!
//! One enum for the whole crate keeps the FFI error-code mapping flat.
//! Variants distinguish contract violations (bad input, point outside the
//! declared domain) from numerical failures (integrator underflow, saddle
//! search divergence) so callers can map them to distinct exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or state that violates an operation's contract.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Point lies outside a surface's declared domain rectangle.
    #[error("point ({0}, {1}) outside surface domain")]
    OutsideDomain(f64, f64),

    /// Classically forbidden point: P0^2 = 2 mu0 (E - V) <= 0.
    #[error("classically forbidden point: E - V = {0} at ({1}, {2})")]
    Forbidden(f64, f64, f64),

    /// Newton search for the saddle failed to converge.
    #[error("saddle search did not converge: {0}")]
    SaddleSearch(String),

    /// Adaptive integrator failed (step underflow or step budget exhausted).
    #[error("integration failed: {0}")]
    Integration(String),

    /// Trajectory left the tube around the extremal ray; the moving-frame
    /// transformation is not defined there.
    #[error("projection failed: {0}")]
    Projection(String),

    /// Asymptotic frequency extraction failed (tail not settled).
    #[error("asymptote not settled: {0}")]
    Asymptote(String),

    /// Malformed input file (surface JSON, profile CSV, manifest).
    #[error("schema violation in {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors that indicate a numerical breakdown rather than a
    /// contract violation; the CLI maps these to exit code 3.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SaddleSearch(_)
                | Error::Integration(_)
                | Error::Projection(_)
                | Error::Asymptote(_)
                | Error::Forbidden(..)
        )
    }
}

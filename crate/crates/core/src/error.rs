//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by the numerical routines, the expression parser and the CLI layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A gamma function argument hit a pole (a non-positive integer).
    #[error("gamma pole at {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    /// An iterative method (series, quadrature, marching) failed to reach its tolerance.
    #[error("no convergence in {context}: {detail}")]
    NonConvergence { context: String, detail: String },

    /// Parameters outside the validity domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Degenerate (logarithmic) parameter case that is not implemented.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// Complex spectral argument outside the holomorphy strip of the transform.
    #[error("spectral argument Im s = {im} outside the strip |Im s| < {bound}")]
    Strip { im: f64, bound: f64 },

    /// Barnes contour passes through a pole or fails to separate the pole families.
    #[error("contour error: {0}")]
    Contour(String),

    /// Malformed expression source.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    /// Unsupported request (e.g. a node count outside the tabulated range).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Input/output failures surfaced by the CLI.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn no_conv(context: &str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            context: context.to_string(),
            detail: detail.into(),
        }
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

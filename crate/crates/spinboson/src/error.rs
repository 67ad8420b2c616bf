//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by model validation, propagator evaluation, quadrature
/// refinement and the diagonalization oracles.
#[derive(Debug, Error)]
pub enum Error {
    /// A model failed an admissibility check (non-Hermitian input, degenerate
    /// or insufficiently isolated ground state, infrared-divergent coupling,
    /// parameters out of range).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// An operator was requested at a point outside its domain, e.g. the full
    /// resolvent at shift `r = 0`, `η = 0`.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature refinement loop failed to stabilize.  The trace carries
    /// the successive estimates so the divergence is visible in reports.
    #[error("quadrature did not converge for {context}; refinement trace {trace:?}")]
    QuadratureDivergence { context: String, trace: Vec<f64> },

    /// An eigensolver did not reach its residual target.
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    /// A requested basis or matrix exceeds the configured size limit.
    #[error("dimension limit exceeded: {0}")]
    DimensionLimit(String),

    /// Invalid run configuration (bad parameter combination, malformed file).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

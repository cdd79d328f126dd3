use thiserror::Error;

/// Errors raised by the entanglement pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested filling cuts through a cluster of (numerically) equal
    /// energies.
    #[error("filling splits a degenerate level around index {index} (gap {gap:e})")]
    DegenerateFermiLevel { index: usize, gap: f64 },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("operator does not commute with the correlation matrix (relative norm {norm:e})")]
    NotACommutant { norm: f64 },

    #[error("commutant spectrum is degenerate (relative gap {gap:e})")]
    DegenerateCommutant { gap: f64 },

    #[error("not an association scheme: axiom `{axiom}` fails at {witness}")]
    NotAScheme { axiom: String, witness: String },

    #[error("scheme is not P-polynomial: {0}")]
    NotPPolynomial(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

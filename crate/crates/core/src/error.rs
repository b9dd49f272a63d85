//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A function was evaluated at (or within tolerance of) a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// A series or an adaptive rule exhausted its budget before meeting tolerance.
    #[error("failed to converge: {0}")]
    NonConvergence(String),

    /// An argument lies outside the contract of the operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A Bessel or MeijerG order outside the supported family.
    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),

    /// Two states were combined that do not share class, fixed index or parameters.
    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    /// The operation is not defined for the given coherent state class.
    #[error("unsupported class: {0}")]
    UnsupportedClass(String),

    /// A check that relies on distinct phase energies met a collision.
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
}

//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the simulation and tomography layers.
///
/// Most constructors validate their inputs eagerly so that bad data is
/// rejected where it enters rather than deep inside a reconstruction loop.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix or vector had the wrong dimensions for the requested
    /// operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A numeric argument was outside its allowed range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix failed a structural requirement (hermiticity, positivity,
    /// normalization, unitarity).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// The post-selected interferometer output cannot be summarized as a
    /// single two-qubit operator acting on the input polarization state.
    #[error("output is not a polarization operator: {0}")]
    NotAnOperator(String),

    /// A remote-control protocol annihilated the input state, so no gate
    /// output exists to normalize.
    #[error("protocol annihilated the input state (norm {norm:.3e})")]
    Annihilated {
        /// Norm of the unnormalized output state.
        norm: f64,
    },

    /// Probability data handed to the count simulator was not a valid
    /// conditional distribution.
    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    /// A numerical routine (eigensolver, decomposition, optimizer) failed to
    /// produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

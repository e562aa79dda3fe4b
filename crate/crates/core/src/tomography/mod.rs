//! Quantum process tomography.
//!
//! The chain runs: a channel (ideal operator, chi matrix, or the physical
//! simulation in [`crate::experiment`]) produces Born probabilities over an
//! informationally complete design; Poisson count simulation turns them into
//! coincidence data; linear inversion and Cholesky-parameterized likelihood
//! maximization reconstruct the chi matrix; Uhlmann-style process fidelity
//! and Poisson-resampled bootstrap give the headline number and its error
//! bar.
//!
//! Probabilities are conditioned on post-selection throughout: each
//! (preparation, setting) row is renormalized to the counts that actually
//! arrive, because that is what coincidence counting measures. Rows whose
//! success weight is exactly zero (inputs the channel annihilates) stay
//! all-zero.

mod bootstrap;
mod chi;
mod counts;
mod design;
mod fidelity;
mod kernels;
mod linear;
mod mle;
mod probs;

pub use bootstrap::{bootstrap_fidelity, bootstrap_fidelity_prepared, BootstrapSummary};
pub use chi::{ideal_chi, ChiMatrix};
pub use counts::{simulate_counts, CountTable};
pub use design::{
    single_qubit_basis_states, single_qubit_prep_states, TomographyDesign, BASIS_LABELS,
};
pub use fidelity::process_fidelity;
pub use kernels::PreparedDesign;
pub use linear::{linear_inversion_chi, linear_inversion_chi_from_probabilities};
pub use mle::{mle_chi, mle_chi_from_counts_prepared, MleOutcome};
pub use probs::{born_probabilities, Channel, ProbabilityTable};

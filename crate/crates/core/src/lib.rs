//! Simulation toolkit for photonic controlled-unitary gates built from
//! polarization qubits and time-bin post-selection.
//!
//! The library covers the full chain from optical hardware description to
//! reconstructed process matrices:
//!
//! * [`linalg`] - small dense complex linear algebra helpers (tensor products,
//!   Pauli expansions, matrix square roots) shared by everything else.
//! * [`optics`] - Jones calculus for wave plates and the polarization gate set.
//! * [`interferometer`] - amplitude bookkeeping for the Michelson / Mach-Zehnder
//!   pair that realizes a controlled unitary on coincidence post-selection.
//! * [`remote`] - the two remote-control protocols that turn the gate into a
//!   programmable single-qubit operation on the target photon.
//! * [`tomography`] - process tomography: Born probabilities, count simulation,
//!   linear inversion, maximum-likelihood reconstruction, process fidelity and
//!   Monte-Carlo error bars.
//! * [`noise`] - quasi-static phase and alignment noise plus depolarization.
//! * [`experiment`] - glue that runs a simulated experiment end to end and
//!   produces count tables the tomography layer can digest.
//! * [`selfcheck`] - an executable battery of the library's internal
//!   invariants, used by the command line `verify` subcommand.

pub mod error;
pub mod experiment;
pub mod interferometer;
pub mod linalg;
pub mod noise;
pub mod optics;
pub mod remote;
pub mod rng;
pub mod selfcheck;
pub mod tomography;

pub use error::Error;

// Matrix types appear in the public API, so the crate behind them does too.
pub use nalgebra;
pub use num_complex;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

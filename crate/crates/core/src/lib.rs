//! Entropies of quasi-free fermionic states computed from reduced one-particle
//! density operators.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: Hermitian operators, projectors and eigendecompositions.
//! - [`spectral`]: the entropy functionals (von Neumann, Rényi, subsystem,
//!   relative) and the modular-operator map acting on one-particle densities.
//! - [`fock`]: a brute-force Fock-space implementation used as ground truth
//!   for every one-particle formula (up to 12 modes).
//! - [`gaussian`]: quadratic lattice Hamiltonians (Kitaev chain), Bogoliubov
//!   diagonalization and the covariance / complex-structure description.
//! - [`cfs`]: local correlation operators, the counting-measure operators
//!   `σ`, `σ_V`, causal classification and the κ-Lagrangian.
//! - [`dirac`]: the regularized two-dimensional Dirac sea on a spatial grid
//!   and the entanglement entropy of an interval.
//! - [`random`]: seeded random unitaries and densities.

pub mod cfs;
pub mod dirac;
pub mod error;
pub mod fit;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod random;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{HermitianOperator, ProjectorSpec, C64};
pub use spectral::{ClampReport, DensitySpectrum, RelativeEntropy};

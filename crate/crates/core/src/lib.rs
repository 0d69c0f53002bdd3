//! Quantum hockey-stick divergences and the bounds built on them.
//!
//! The crate is organized bottom up:
//!
//! * [`matrix`]: dense complex matrices, Hermitian eigendecomposition, positive parts.
//! * [`state`], [`channel`], [`classical`]: density operators, Kraus channels, stochastic matrices.
//! * [`divergence`]: `E_γ`, trace distance, `D_max`, smoothed `D_max` and f-divergences.
//! * [`contraction`]: contraction coefficients and `B^{γ,δ}` membership certificates.
//! * [`bounds`]: scalar calculators for strong data-processing, mixing-time and reverse-Pinsker bounds.
//! * [`privacy`]: local differential privacy composition and f-divergence bounds.
//! * [`verify`]: randomized property suites that tie the above together.
//!
//! Logarithms are natural throughout, so `γ = e^ε`.

pub mod bounds;
pub mod channel;
pub mod classical;
pub mod contraction;
pub mod divergence;
pub mod error;
pub mod matrix;
pub mod privacy;
pub mod random;
pub mod state;
pub mod verify;

pub use channel::{achievability_channel, apply_channel, choi, compose, depolarizing, fixed_point, iterate, ChoiOperator, QuantumChannel};
pub use classical::{classical_apply, ClassicalChannel};
pub use error::{Error, Result};
pub use matrix::{eig_hermitian, min_eigenvalue, positive_part, ComplexMatrix, HermitianOperator, Spectrum, C64};
pub use state::{validate_density, DensityOperator, PureState};

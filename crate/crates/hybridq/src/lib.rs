//! Numerical toolkit for hybrid oscillator–qubit states: state-family
//! constructors, filtered quasiprobability matrices, joint and conditional
//! measurement statistics, moment-based nonclassicality criteria, a
//! separability-eigenvalue see-saw solver, and a Monte-Carlo sampler —
//! with every closed form cross-checked against truncated-Fock numerics.
//!
//! The composite Hilbert space is a truncated Fock oscillator tensored with
//! a qubit, indexed Fock-major (the amplitude of |n⟩⊗|q⟩ lives at 2n + q).
//! All public operations are pure functions of their inputs and safe to
//! call concurrently.

pub mod entanglement;
pub mod error;
pub mod filter;
pub mod fock;
pub mod measurement;
pub mod moments;
pub mod numeric;
pub mod quasiprob;
pub mod sampler;
pub mod states;

pub use error::{Error, Result};
pub use filter::{PhaseSpaceFilter, SincSqFilter};
pub use fock::{CMat, CVec, FockConfig, HybridOperator, HybridVector, QubitBasis, Subsystem};
pub use measurement::{JointDistribution, Sign};
pub use quasiprob::{GridSpec, Mat2, PMatrixGrid};
pub use states::{CatParams, Sigma};

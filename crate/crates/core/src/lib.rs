//! Geometric phases of finite-dimensional quantum systems in Hopf-fibration
//! coordinates.
//!
//! Pure states of an `(N+1)`-level system live on `S^{2N+1}`, which fibers
//! over `CP^N` with `U(1)` fibers; even-dimensional systems additionally
//! fiber over `HP^K` with `SU(2)` fibers. This crate provides the chart
//! machinery for both fibrations, the Kähler and quaternionic-Kähler
//! connections, time-ordered evolution, Chern-number quadratures and the
//! CHSH/entanglement relations built on top of them.
//!
//! Module map:
//!
//! * [`hilbert`]: state vectors, `CP^N` charts and transitions.
//! * [`abelian`]: Kähler connection, phase integrals, overlap identity,
//!   first and second Chern numbers on `CP^1`/`CP^2`.
//! * [`evolution`]: Schrödinger integrator, spin-J rotating-field operators.
//! * [`quaternionic`]: `HP^K` coordinates, `SU(2)` connection and holonomy,
//!   BPST instanton.
//! * [`entanglement`]: CHSH operator and the bipartite basis map.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abelian;
pub mod entanglement;
pub mod evolution;
pub mod hilbert;
pub mod linalg;
pub mod quadrature;
pub mod quaternionic;
pub mod sampling;
pub mod systems;
pub mod tolerances;

pub use num_complex::Complex64;

use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize a zero vector (norm {norm:e})")]
    ZeroVector { norm: f64 },
    #[error("state vector must have at least 2 components, got {0}")]
    TooShort(usize),
    #[error("chart {patch} is singular: |component| = {modulus:e}")]
    ChartSingular { patch: usize, modulus: f64 },
    #[error("patch index {patch} out of range for dimension {dim}")]
    PatchOutOfRange { patch: usize, dim: usize },
    #[error("operator is not Hermitian: |H - H^dagger| = {deviation:e}")]
    NonHermitian { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("spin J = {twice_j}/2 exceeds the supported dimension (2J+1 <= 64)")]
    DimensionTooLarge { twice_j: u32 },
    #[error("rotating-field parameters give cos(beta) = {cos_beta:e}")]
    DegenerateBeta { cos_beta: f64 },
    #[error("path is not closed in projective space (relative gap {gap:e})")]
    NotClosed { gap: f64 },
    #[error("quaternionic coordinates need an even dimension, got {0}")]
    OddDimension(usize),
    #[error("trajectory needs at least {needed} samples, got {actual}")]
    TooFewSamples { needed: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

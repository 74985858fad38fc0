//! Separability tests for multimode Gaussian states based on partial scaling
//! of momentum quadratures.
//!
//! A Gaussian state is described by its covariance matrix `σ` in the
//! canonical `(q₁..qₙ, p₁..pₙ)` ordering with ħ = 1 (vacuum variance ½).
//! Scaling every momentum `pᵢ → λᵢ pᵢ` with `λᵢ ∈ [-1, 1]` maps a separable
//! state onto another physical state, so a negative leading principal minor
//! of `σ_λ + (i/2)Ω` witnesses entanglement. The choice `λ = ±1` is the
//! partial transpose test.
//!
//! The crate is organised as:
//!
//! * [`gaussian`]: pure-state specifications, covariance matrices and the
//!   physicality check.
//! * [`scaling`]: the scaled covariance, the shifted minors and the
//!   regularized determinant that stays finite at `λᵢ = 0`.
//! * [`scan`] and [`witness`]: grid slices through the `λ` box and the
//!   multi-start search for the most negative regularized determinant.
//! * [`io`] and [`cli`]: state files, reports, CSV grids and the `gsep`
//!   command line.

pub mod cli;
mod error;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod nelder_mead;
pub mod scaling;
pub mod scan;
pub mod witness;

pub use error::{AdmissibilityError, Error, Result};
pub use gaussian::{CovarianceMatrix, Physicality, PureStateSpec, SymplecticShift};
pub use scaling::{MinorReport, PptReport, ScalingVector};
pub use scan::{ScanGrid, ScanSummary, SlicePlan};
pub use witness::{MinimizeOptions, Verdict, WitnessResult};

/// Default absolute tolerance on the smallest eigenvalue of `σ + (i/2)Ω`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Default absolute tolerance below which a minor counts as a witness.
pub const WITNESS_TOL: f64 = 1e-9;

/// Largest supported mode count.
pub const MAX_MODES: usize = 8;

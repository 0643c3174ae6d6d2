//! Numerical tolerances used across the crate.
//!
//! All thresholds live here so that every comparison in the library has one
//! named, documented origin. Values are stated for `f64`; generic code
//! converts through [`crate::Real::from_f64_lossy`].

/// Absolute deviation allowed when certifying Hermiticity entrywise.
pub const HERMITIAN_ABS: f64 = 1e-12;

/// Eigenvalues above this floor count as non-negative; values in
/// `[PSD_FLOOR, 0)` are numerical noise and get clamped to zero.
pub const PSD_FLOOR: f64 = -1e-10;

/// A squared norm within this distance of 1 counts as normalized.
pub const NORMALIZED_ABS: f64 = 1e-12;

/// Operators with trace at or below this are treated as zero.
pub const ZERO_TRACE: f64 = 1e-12;

/// Default relative gap under which the two largest eigenvalues count as a
/// degenerate (tied) dominant eigenvalue.
pub const TIE_RELATIVE: f64 = 1e-10;

/// Default relative gap under which adjacent eigenvalues fall into the same
/// cluster of an eigensubspace signature.
pub const CLUSTER_RELATIVE: f64 = 1e-9;

/// Eigenvalues at or below this absolute size belong to the nullspace
/// cluster, which signatures omit.
pub const NULLSPACE_ABS: f64 = 1e-12;

/// Occupation-number amplitudes at or below this magnitude are pruned.
pub const AMPLITUDE_PRUNE: f64 = 1e-15;

/// Relative tolerance for declaring the two local outcome weights tied.
pub const OUTCOME_TIE_RELATIVE: f64 = 1e-12;

/// Scattering tables must have unit rows and orthogonal row pairs within
/// this absolute tolerance.
pub const PROCESS_UNITARITY_ABS: f64 = 1e-12;

/// Magnitude below which a sampled photon counts as vanishing and is
/// redrawn.
pub const PHOTON_REDRAW_ABS: f64 = 1e-12;

/// Frobenius deviation allowed for projector idempotency, `P^2 = P`.
pub const IDEMPOTENT_FROB: f64 = 1e-10;

/// Frobenius norm allowed for commutators of a projector family.
pub const COMMUTATOR_FROB: f64 = 1e-10;

/// Frobenius deviation allowed when reconstructing a special-basis
/// projector from its witness product.
pub const WITNESS_FROB: f64 = 1e-9;

/// Absolute error budget for the Rayleigh probability quadrature.
pub const QUADRATURE_ABS: f64 = 1e-8;

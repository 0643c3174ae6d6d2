//! Numerical simulator for local-observer state reconstruction and
//! photon-scattering measurement statistics.
//!
//! The library models a small "universe" as a truncated occupation-number
//! space whose single-particle modes are split into a locally accessible and
//! an inaccessible sector. A local observer reconstructs the state of that
//! universe through the stripping map (incoherent removal of the inaccessible
//! sector) followed by projection onto the dominant eigensubspace. Scattering
//! a photon of unknown polarization off a local qubit then produces outcomes
//! that are deterministic globally but random locally; depending on the
//! scattering table the observed statistics are uniform, a projection onto
//! the dominant amplitude, or Born-rule distributed. On top of the
//! single-qubit processes sit branch trees with recorded histories and a
//! projector cascade that realizes projective measurement on arbitrary
//! finite-dimensional spaces.
//!
//! All core math is generic over the floating-point scalar via [`Real`];
//! concrete `f64` aliases are exported at the crate root.

pub mod atomphoton;
pub mod branching;
pub mod cascade;
pub mod float;
pub mod fock;
pub mod formats;
pub mod linalg;
pub mod quad;
pub mod rng;
pub mod scattering;
pub mod statespace;
pub mod stats;
pub mod tol;

pub use float::Real;

/// Complex matrix over `f64`.
pub type CMatrix = linalg::CMatrix<f64>;
/// Pure-state amplitude vector over `f64`.
pub type StateVector = statespace::StateVector<f64>;
/// Non-negative Hermitian operator over `f64`.
pub type NonNegativeOperator = statespace::NonNegativeOperator<f64>;
/// Eigensubspace signature over `f64`.
pub type EigenSignature = statespace::EigenSignature<f64>;
/// Occupation-number state over `f64`.
pub type FockStateVector = fock::FockStateVector<f64>;
/// Stripped (locally reconstructed) operator over `f64`.
pub type StrippedState = fock::StrippedState<f64>;
/// Photon polarization amplitudes over `f64`.
pub type PhotonState = scattering::PhotonState<f64>;
/// Local qubit amplitudes over `f64`.
pub type QubitState = scattering::QubitState<f64>;
/// Elementary scattering table over `f64`.
pub type ScatteringProcess = scattering::ScatteringProcess<f64>;
/// Branch tree over `f64`.
pub type BranchTree = branching::BranchTree<f64>;
/// Commuting projector family over `f64`.
pub type ProjectorSet = cascade::ProjectorSet<f64>;
/// Atom-photon realization of Born scattering over `f64`.
pub type AtomPhotonProcess = atomphoton::AtomPhotonProcess<f64>;

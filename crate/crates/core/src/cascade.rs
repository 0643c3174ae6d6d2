//! Projective measurement on arbitrary finite spaces via scattering
//! cascades.
//!
//! A commuting family of projectors is *complete* when its joint
//! eigenspaces are all one-dimensional; the joint eigenvectors form the
//! special basis the cascade measures in. Each stage splits the current
//! state into a projected and a complementary branch, hands the two branch
//! norms to a Born scattering event as the qubit amplitudes, and keeps the
//! locally dominant branch along with the recorded bit. Stage probabilities
//! telescope: the product over a realized path equals
//! `<psi| P_path |psi> / <psi|psi>`, so a complete cascade reproduces the
//! squared overlap with one special basis vector - projector order only
//! permutes the recorded bits.

use num_complex::Complex;
use rand::Rng;
use thiserror::Error;

use crate::float::Real;
use crate::linalg::CMatrix;
use crate::rng::{master, substream};
use crate::scattering::{
    builtin_process, local_outcome, sample_photon, BuiltinProcess, Outcome, PhotonState,
    QubitState, TieOutcome,
};
use crate::statespace::{NonNegativeOperator, StateError, StateVector};
use crate::stats::{chi_square_gof, ChiSquare};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidateError {
    #[error("projector {index} is not idempotent (deviation {deviation:.3e})")]
    NotIdempotent { index: usize, deviation: f64 },
    #[error("projectors {first} and {second} do not commute (deviation {deviation:.3e})")]
    NotCommuting {
        first: usize,
        second: usize,
        deviation: f64,
    },
    #[error(
        "joint eigenvector has ambiguous membership in projector {projector} (expectation {expectation:.3e})"
    )]
    AmbiguousPattern { projector: usize, expectation: f64 },
    #[error("witness product for basis vector {basis_index} deviates by {deviation:.3e}")]
    WitnessMismatch { basis_index: usize, deviation: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CascadeError {
    #[error("projector set is not complete (joint eigenspace dimensions {joint_dimensions:?})")]
    IncompleteSet { joint_dimensions: Vec<usize> },
    #[error("cascade order never applies projector {index}")]
    OrderMissingProjector { index: usize },
    #[error(transparent)]
    Tie(#[from] TieOutcome),
    #[error(transparent)]
    Validate(#[from] ValidateError),
}

/// Commuting projectors on one Hilbert space. Hermiticity and positive
/// semidefiniteness are checked at construction; idempotency and
/// commutation are checked by [`ProjectorSet::validate`] so that loaded
/// data surfaces them as diagnostics.
#[derive(Clone, Debug)]
pub struct ProjectorSet<T> {
    dim: usize,
    projectors: Vec<NonNegativeOperator<T>>,
}

impl<T: Real> ProjectorSet<T> {
    pub fn new(dim: usize, matrices: Vec<CMatrix<T>>) -> Result<Self, StateError> {
        let mut projectors = Vec::with_capacity(matrices.len());
        for m in matrices {
            if m.dim() != dim {
                return Err(StateError::DimensionMismatch {
                    left: dim,
                    right: m.dim(),
                });
            }
            projectors.push(NonNegativeOperator::new(m)?);
        }
        Ok(Self { dim, projectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projector(&self, n: usize) -> &NonNegativeOperator<T> {
        &self.projectors[n]
    }

    /// `P_n psi` and `(1 - P_n) psi`; squared norms add up to `|psi|^2`.
    pub fn split(&self, n: usize, psi: &StateVector<T>) -> SplitBranches<T> {
        assert_eq!(psi.dim(), self.dim, "state dimension mismatch");
        let projected = self.projectors[n].matrix().mul_vec(psi.amplitudes());
        let complement: Vec<Complex<T>> = psi
            .amplitudes()
            .iter()
            .zip(&projected)
            .map(|(full, p)| full - p)
            .collect();
        SplitBranches {
            zero: StateVector::new(projected).expect("dim >= 1"),
            one: StateVector::new(complement).expect("dim >= 1"),
        }
    }

    /// Checks the family invariants and works out the joint eigenspace
    /// structure, completeness, independence, and (when complete) the
    /// special basis with its witness index sets.
    pub fn validate(&self) -> Result<CompletenessReport<T>, ValidateError> {
        let idempotent_tol = T::from_f64_lossy(tol::IDEMPOTENT_FROB);
        for (index, p) in self.projectors.iter().enumerate() {
            let m = p.matrix();
            let deviation = m.mul(m).sub(m).frobenius_norm();
            if deviation > idempotent_tol {
                return Err(ValidateError::NotIdempotent {
                    index,
                    deviation: deviation.as_f64(),
                });
            }
        }
        let commutator_tol = T::from_f64_lossy(tol::COMMUTATOR_FROB);
        for i in 0..self.projectors.len() {
            for j in (i + 1)..self.projectors.len() {
                let deviation = self.projectors[i]
                    .matrix()
                    .commutator_norm(self.projectors[j].matrix());
                if deviation > commutator_tol {
                    return Err(ValidateError::NotCommuting {
                        first: i,
                        second: j,
                        deviation: deviation.as_f64(),
                    });
                }
            }
        }

        // Joint eigenbasis from a weighted sum: distinct 0/1 patterns get
        // distinct eigenvalues (binary expansion), so the eigenvectors of
        // the sum simultaneously diagonalize the family.
        let mut weighted = CMatrix::zeros(self.dim);
        for (n, p) in self.projectors.iter().enumerate() {
            let w = T::from_f64_lossy(0.5f64.powi(n as i32 + 1));
            weighted = weighted.add(&p.matrix().scale(w));
        }
        let eigen = weighted.hermitian_eigen();

        let mut clusters: Vec<(Vec<bool>, Vec<Vec<Complex<T>>>)> = Vec::new();
        for vector in eigen.vectors {
            let mut pattern = Vec::with_capacity(self.projectors.len());
            for (n, p) in self.projectors.iter().enumerate() {
                let image = p.matrix().mul_vec(&vector);
                let expectation = crate::linalg::inner(&vector, &image).re;
                let e = expectation.as_f64();
                if e > 1.0 - 1e-7 {
                    pattern.push(true);
                } else if e < 1e-7 {
                    pattern.push(false);
                } else {
                    return Err(ValidateError::AmbiguousPattern {
                        projector: n,
                        expectation: e,
                    });
                }
            }
            match clusters.iter_mut().find(|(p, _)| *p == pattern) {
                Some((_, vectors)) => vectors.push(vector),
                None => clusters.push((pattern, vec![vector])),
            }
        }

        // Record order: bit n is 0 where P_n holds, 1 where the complement
        // holds; sort by that record read as a binary number, first
        // projector most significant.
        clusters.sort_by_key(|(pattern, _)| pattern_record_value(pattern));
        let joint_dimensions: Vec<usize> = clusters.iter().map(|(_, v)| v.len()).collect();
        let complete = clusters.iter().all(|(_, v)| v.len() == 1);

        let independent = if self.projectors.is_empty() {
            self.dim == 1
        } else {
            (0..self.projectors.len()).all(|removed| {
                let mut reduced: Vec<Vec<bool>> = clusters
                    .iter()
                    .map(|(pattern, _)| {
                        pattern
                            .iter()
                            .enumerate()
                            .filter(|(n, _)| *n != removed)
                            .map(|(_, &bit)| bit)
                            .collect()
                    })
                    .collect();
                let distinct_before = reduced.len();
                reduced.sort();
                reduced.dedup();
                reduced.len() < distinct_before
            })
        };

        let mut special_basis = None;
        let mut witnesses = Vec::new();
        if complete {
            let mut basis = Vec::with_capacity(clusters.len());
            for (basis_index, (pattern, vectors)) in clusters.iter().enumerate() {
                let vector = StateVector::new(vectors[0].clone())
                    .expect("dim >= 1")
                    .with_canonical_phase();
                let applied: Vec<usize> = pattern
                    .iter()
                    .enumerate()
                    .filter(|(_, &bit)| bit)
                    .map(|(n, _)| n)
                    .collect();
                let complemented: Vec<usize> = pattern
                    .iter()
                    .enumerate()
                    .filter(|(_, &bit)| !bit)
                    .map(|(n, _)| n)
                    .collect();

                // witness soundness: the product must rebuild |k><k|
                let mut product = CMatrix::identity(self.dim);
                for &n in &applied {
                    product = product.mul(self.projectors[n].matrix());
                }
                for &n in &complemented {
                    let complement = CMatrix::identity(self.dim).sub(self.projectors[n].matrix());
                    product = product.mul(&complement);
                }
                let mut expected = CMatrix::zeros(self.dim);
                expected.accumulate_outer(vector.amplitudes());
                let deviation = product.sub(&expected).frobenius_norm();
                if deviation > T::from_f64_lossy(tol::WITNESS_FROB) {
                    return Err(ValidateError::WitnessMismatch {
                        basis_index,
                        deviation: deviation.as_f64(),
                    });
                }

                witnesses.push(Witness {
                    basis_index,
                    pattern: pattern.clone(),
                    applied,
                    complemented,
                });
                basis.push(vector);
            }
            special_basis = Some(basis);
        }

        Ok(CompletenessReport {
            complete,
            independent,
            joint_dimensions,
            special_basis,
            witnesses,
        })
    }
}

fn pattern_record_value(pattern: &[bool]) -> u64 {
    pattern.iter().fold(0u64, |acc, &in_range| {
        (acc << 1) | if in_range { 0 } else { 1 }
    })
}

/// The two halves of a projective split.
#[derive(Clone, Debug)]
pub struct SplitBranches<T> {
    /// `P_n psi`, recorded as bit 0.
    pub zero: StateVector<T>,
    /// `(1 - P_n) psi`, recorded as bit 1.
    pub one: StateVector<T>,
}

/// Index sets reconstructing one special basis projector:
/// `prod_{n in applied} P_n prod_{m in complemented} (1 - P_m) = |k><k|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub basis_index: usize,
    /// `pattern[n]` is true when `P_n` preserves the basis vector.
    pub pattern: Vec<bool>,
    pub applied: Vec<usize>,
    pub complemented: Vec<usize>,
}

/// Outcome of [`ProjectorSet::validate`].
#[derive(Clone, Debug)]
pub struct CompletenessReport<T> {
    pub complete: bool,
    pub independent: bool,
    /// Dimensions of the joint eigenspaces, in record order.
    pub joint_dimensions: Vec<usize>,
    /// Joint eigenbasis (present iff complete), in record order.
    pub special_basis: Option<Vec<StateVector<T>>>,
    pub witnesses: Vec<Witness>,
}

impl<T: Real> CompletenessReport<T> {
    /// Basis index whose pattern matches `bit == 0 where P applied`.
    fn basis_index_for_bits(&self, final_bits: &[u8]) -> Option<usize> {
        self.witnesses
            .iter()
            .find(|w| {
                w.pattern
                    .iter()
                    .zip(final_bits)
                    .all(|(&in_range, &bit)| in_range == (bit == 0))
            })
            .map(|w| w.basis_index)
    }
}

/// One stage of the cascade.
#[derive(Clone, Debug)]
pub struct CascadeStep<T> {
    pub state: StateVector<T>,
    pub bit: u8,
    /// Analytic probability of the recorded bit,
    /// `|Q psi|^2 / |psi|^2` for the chosen `Q`.
    pub stage_probability: T,
}

/// Splits on projector `n`, then lets a Born scattering event on a fresh
/// qubit (amplitudes = the two branch norms) decide which branch the local
/// observer keeps. A zero-norm branch carries zero weight and can never win
/// the comparison, so the kept branch is always nonzero.
pub fn cascade_step<T: Real>(
    set: &ProjectorSet<T>,
    n: usize,
    psi: &StateVector<T>,
    photon: &PhotonState<T>,
) -> Result<CascadeStep<T>, TieOutcome> {
    let split = set.split(n, psi);
    let w_zero = split.zero.norm_sqr();
    let w_one = split.one.norm_sqr();
    debug_assert!(w_zero + w_one > T::zero(), "cascade_step needs nonzero psi");
    let qubit = QubitState {
        a: Complex::new(w_zero.sqrt(), T::zero()),
        b: Complex::new(w_one.sqrt(), T::zero()),
    };
    let born = builtin_process::<T>(BuiltinProcess::Born);
    let local = local_outcome(&born, photon, &qubit)?;
    let total = w_zero + w_one;
    Ok(match local.outcome {
        Outcome::Zero => CascadeStep {
            state: split.zero,
            bit: 0,
            stage_probability: w_zero / total,
        },
        Outcome::One => CascadeStep {
            state: split.one,
            bit: 1,
            stage_probability: w_one / total,
        },
    })
}

/// Result of a full cascade run.
#[derive(Clone, Debug)]
pub struct CascadeOutcome<T> {
    /// Index into the special basis the final state collapsed to.
    pub basis_index: usize,
    /// Recorded bits in order of stage application.
    pub qubit_record: Vec<u8>,
    /// Analytic weight `|<k|psi>|^2 / <psi|psi>` of this outcome.
    pub probability_weight: T,
    /// Realized per-stage probabilities; their product telescopes to
    /// `probability_weight`.
    pub stage_probabilities: Vec<T>,
}

/// Validates the set and runs one cascade in canonical projector order,
/// drawing stage photons from the master stream of `seed`.
///
/// One stage per projector suffices: for a complete commuting family a
/// single pass already cuts the state down to a rank-one joint eigenspace,
/// and any repeated application only multiplies by an idempotent factor
/// (probability one). Repetitions are still accepted through
/// [`run_cascade_prepared`] for experiments on interleaved orders.
pub fn run_cascade<T: Real>(
    set: &ProjectorSet<T>,
    psi: &StateVector<T>,
    seed: u64,
) -> Result<CascadeOutcome<T>, CascadeError> {
    let report = set.validate()?;
    let order: Vec<usize> = (0..set.len()).collect();
    let mut rng = master(seed);
    run_cascade_prepared(set, &report, &order, psi, &mut rng)
}

/// Cascade with an explicit stage order (repeats allowed; every projector
/// must appear at least once). The caller supplies a validated report and
/// the photon stream.
pub fn run_cascade_prepared<T: Real, R: Rng + ?Sized>(
    set: &ProjectorSet<T>,
    report: &CompletenessReport<T>,
    order: &[usize],
    psi: &StateVector<T>,
    rng: &mut R,
) -> Result<CascadeOutcome<T>, CascadeError> {
    if !report.complete {
        return Err(CascadeError::IncompleteSet {
            joint_dimensions: report.joint_dimensions.clone(),
        });
    }
    if let Some(missing) = (0..set.len()).find(|n| !order.contains(n)) {
        return Err(CascadeError::OrderMissingProjector { index: missing });
    }
    assert_eq!(psi.dim(), set.dim(), "state dimension mismatch");

    let mut state = psi.clone();
    let mut qubit_record = Vec::with_capacity(order.len());
    let mut stage_probabilities = Vec::with_capacity(order.len());
    let mut final_bits = vec![0u8; set.len()];
    for &n in order {
        let photon = sample_photon::<T, _>(rng);
        let step = cascade_step(set, n, &state, &photon)?;
        qubit_record.push(step.bit);
        stage_probabilities.push(step.stage_probability);
        final_bits[n] = step.bit;
        state = step.state;
    }

    let basis_index = report
        .basis_index_for_bits(&final_bits)
        .expect("complete sets realize every surviving bit pattern");
    let basis = report
        .special_basis
        .as_ref()
        .expect("complete report carries the basis");
    let overlap = basis[basis_index]
        .inner(psi)
        .expect("dimensions agree")
        .norm_sqr();
    Ok(CascadeOutcome {
        basis_index,
        qubit_record,
        probability_weight: overlap / psi.norm_sqr(),
        stage_probabilities,
    })
}

/// Analytic outcome weights of a cascade under a given stage order: for
/// each special basis vector, the product of stage probabilities along the
/// (unique) surviving path. Telescoping makes these order-independent.
pub fn analytic_outcome_weights<T: Real>(
    set: &ProjectorSet<T>,
    report: &CompletenessReport<T>,
    order: &[usize],
    psi: &StateVector<T>,
) -> Result<Vec<T>, CascadeError> {
    if !report.complete {
        return Err(CascadeError::IncompleteSet {
            joint_dimensions: report.joint_dimensions.clone(),
        });
    }
    let mut weights = Vec::with_capacity(report.witnesses.len());
    for witness in &report.witnesses {
        let mut state = psi.clone();
        let mut weight = T::one();
        for &n in order {
            let split = set.split(n, &state);
            let (kept, kept_norm, total) = {
                let w0 = split.zero.norm_sqr();
                let w1 = split.one.norm_sqr();
                if witness.pattern[n] {
                    (split.zero, w0, w0 + w1)
                } else {
                    (split.one, w1, w0 + w1)
                }
            };
            if total <= T::zero() || kept_norm <= T::zero() {
                weight = T::zero();
                break;
            }
            weight *= kept_norm / total;
            state = kept;
        }
        weights.push(weight);
    }
    Ok(weights)
}

/// Distribution of many cascade runs against the analytic weights.
#[derive(Clone, Debug)]
pub struct CascadeStatistics {
    pub runs: u64,
    pub ties: u64,
    /// Outcome counts per special basis index.
    pub counts: Vec<u64>,
    /// Analytic weights `|<k|psi>|^2 / <psi|psi>`.
    pub expected_weights: Vec<f64>,
    pub chi_square: ChiSquare,
}

/// Runs `n_runs` independent cascades (substream `seed; run`) in canonical
/// order and tallies the outcomes. Runs hitting a tie are counted and
/// excluded.
pub fn cascade_distribution<T: Real>(
    set: &ProjectorSet<T>,
    psi: &StateVector<T>,
    n_runs: u64,
    seed: u64,
) -> Result<CascadeStatistics, CascadeError> {
    assert!(n_runs >= 1, "at least one run");
    let report = set.validate()?;
    if !report.complete {
        return Err(CascadeError::IncompleteSet {
            joint_dimensions: report.joint_dimensions.clone(),
        });
    }
    let order: Vec<usize> = (0..set.len()).collect();
    let basis = report.special_basis.as_ref().expect("complete");
    let mut counts = vec![0u64; basis.len()];
    let mut ties = 0u64;
    for run in 0..n_runs {
        let mut rng = substream(seed, run);
        match run_cascade_prepared(set, &report, &order, psi, &mut rng) {
            Ok(outcome) => counts[outcome.basis_index] += 1,
            Err(CascadeError::Tie(_)) => ties += 1,
            Err(other) => return Err(other),
        }
    }
    let norm = psi.norm_sqr();
    let expected_weights: Vec<f64> = basis
        .iter()
        .map(|k| (k.inner(psi).expect("dims agree").norm_sqr() / norm).as_f64())
        .collect();

    let completed = n_runs - ties;
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    let mut impossible_seen = false;
    for (k, &w) in expected_weights.iter().enumerate() {
        if w > 1e-15 {
            observed.push(counts[k]);
            expected.push(w * completed as f64);
        } else if counts[k] > 0 {
            impossible_seen = true;
        }
    }
    let mut chi_square = if completed > 0 {
        chi_square_gof(&observed, &expected)
    } else {
        // every run tied; no data to test
        ChiSquare {
            statistic: f64::NAN,
            degrees_of_freedom: 0.0,
            p_value: f64::NAN,
        }
    };
    if impossible_seen {
        chi_square.p_value = 0.0;
    }
    Ok(CascadeStatistics {
        runs: n_runs,
        ties,
        counts,
        expected_weights,
        chi_square,
    })
}

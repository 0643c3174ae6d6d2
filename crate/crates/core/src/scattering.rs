//! Elementary photon-qubit scattering processes and their local statistics.
//!
//! A scattering process is a unitary given as a table: each of the four
//! input basis labels (photon basis vector times qubit basis vector) maps to
//! a normalized combination of `(qubit_out, radiation_label)` outputs. The
//! radiation labels stand for orthonormal outgoing field states; they are
//! locally inaccessible, and only their mutual orthogonality matters after
//! stripping, so they are kept abstract.
//!
//! Three builtin tables cover the canonical cases:
//!
//! * [`BuiltinProcess::Uniform`] - the local outcome depends only on the
//!   unknown photon, giving a fair coin regardless of the qubit.
//! * [`BuiltinProcess::Maximum`] - the outcome depends only on the qubit,
//!   deterministically projecting onto its dominant amplitude.
//! * [`BuiltinProcess::Born`] - photon and qubit mix; over ignorance of the
//!   photon the outcome frequencies are `|a|^2 / (|a|^2 + |b|^2)` and its
//!   complement.
//!
//! Ignorance of the photon is modelled by complex Gaussian amplitudes
//! (invariant under SU(2) changes of polarization basis); the magnitudes are
//! then Rayleigh distributed, and [`rayleigh_oracle`] integrates the
//! comparison probability numerically as an independent check of the closed
//! form.

use num_complex::Complex;
use rand::Rng;
use thiserror::Error;

use crate::float::Real;
use crate::fock::{AccessibilityPartition, FockSpace, FockStateVector};
use crate::quad::{adaptive_simpson, QuadratureFailure};
use crate::rng::{standard_normal_pair, substream};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProcessError {
    #[error("photon or qubit amplitudes must not both vanish")]
    VanishingState,
    #[error("row {row} of the process table is empty")]
    EmptyRow { row: usize },
    #[error("row {row} has squared norm {norm_sqr} (must be 1 within 1e-12)")]
    RowNotUnit { row: usize, norm_sqr: f64 },
    #[error("rows {row_a} and {row_b} overlap ({overlap:.3e}); table is not unitary")]
    RowsNotOrthogonal {
        row_a: usize,
        row_b: usize,
        overlap: f64,
    },
    #[error("row {row} lists the output (qubit {qubit_out}, label {label}) twice")]
    DuplicateOutput {
        row: usize,
        qubit_out: u8,
        label: u32,
    },
    #[error("branch amplitude must lie strictly between 0 and 1 (got {value})")]
    InvalidBranchAmplitude { value: f64 },
}

/// The two local outcome weights are tied within relative tolerance; a
/// measure-zero configuration that is counted rather than broken silently.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("tie outcome: weights {weight_zero:.6e} and {weight_one:.6e} are equal within {tolerance:.1e} relative")]
pub struct TieOutcome {
    pub weight_zero: f64,
    pub weight_one: f64,
    pub tolerance: f64,
}

/// Incoming photon polarization amplitudes. Normalization is not required;
/// the linear process is transparent to the global magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhotonState<T> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
}

impl<T: Real> PhotonState<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Result<Self, ProcessError> {
        if alpha.norm_sqr() + beta.norm_sqr() <= T::zero() {
            return Err(ProcessError::VanishingState);
        }
        Ok(Self { alpha, beta })
    }

    pub fn from_reals(alpha: T, beta: T) -> Result<Self, ProcessError> {
        Self::new(
            Complex::new(alpha, T::zero()),
            Complex::new(beta, T::zero()),
        )
    }

    pub fn norm_sqr(&self) -> T {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            alpha: self.alpha * factor,
            beta: self.beta * factor,
        }
    }

    /// Applies a 2x2 matrix `u` (rows index the output basis).
    pub fn transformed(&self, u: &crate::linalg::CMatrix<T>) -> Self {
        assert_eq!(u.dim(), 2, "polarization transform must be 2x2");
        Self {
            alpha: u[(0, 0)] * self.alpha + u[(0, 1)] * self.beta,
            beta: u[(1, 0)] * self.alpha + u[(1, 1)] * self.beta,
        }
    }
}

/// Local qubit amplitudes on the process-preferred basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
}

impl<T: Real> QubitState<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Result<Self, ProcessError> {
        if a.norm_sqr() + b.norm_sqr() <= T::zero() {
            return Err(ProcessError::VanishingState);
        }
        Ok(Self { a, b })
    }

    pub fn from_reals(a: T, b: T) -> Result<Self, ProcessError> {
        Self::new(Complex::new(a, T::zero()), Complex::new(b, T::zero()))
    }

    /// Qubit with `|a|^2 = weight_zero` and `|b|^2 = 1 - weight_zero`, real
    /// amplitudes.
    pub fn from_probability(weight_zero: T) -> Result<Self, ProcessError> {
        Self::from_reals(weight_zero.sqrt(), (T::one() - weight_zero).sqrt())
    }

    pub fn norm_sqr(&self) -> T {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            a: self.a * factor,
            b: self.b * factor,
        }
    }
}

/// One output component of a table row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessEntry<T> {
    pub qubit_out: u8,
    pub radiation_label: u32,
    pub amplitude: Complex<T>,
}

/// Unitary scattering table over the input basis
/// `(photon basis x qubit basis)` in row order `(v 0), (v 1), (h 0), (h 1)`,
/// where `v`/`h` are the two photon polarization basis vectors.
///
/// Validity means every row is a unit vector over `(qubit_out, label)` pairs
/// and distinct rows are orthogonal, which certifies the table as an
/// isometry onto its image.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringProcess<T> {
    name: String,
    rows: [Vec<ProcessEntry<T>>; 4],
}

impl<T: Real> ScatteringProcess<T> {
    pub fn new(
        name: impl Into<String>,
        rows: [Vec<ProcessEntry<T>>; 4],
    ) -> Result<Self, ProcessError> {
        let tolerance = T::from_f64_lossy(tol::PROCESS_UNITARITY_ABS);
        for (r, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(ProcessError::EmptyRow { row: r });
            }
            for (i, entry) in row.iter().enumerate() {
                if row[..i].iter().any(|e| {
                    e.qubit_out == entry.qubit_out && e.radiation_label == entry.radiation_label
                }) {
                    return Err(ProcessError::DuplicateOutput {
                        row: r,
                        qubit_out: entry.qubit_out,
                        label: entry.radiation_label,
                    });
                }
            }
            let norm_sqr = row
                .iter()
                .fold(T::zero(), |acc, e| acc + e.amplitude.norm_sqr());
            if (norm_sqr - T::one()).abs() > tolerance {
                return Err(ProcessError::RowNotUnit {
                    row: r,
                    norm_sqr: norm_sqr.as_f64(),
                });
            }
        }
        for a in 0..4 {
            for b in (a + 1)..4 {
                let mut overlap = Complex::new(T::zero(), T::zero());
                for ea in &rows[a] {
                    for eb in &rows[b] {
                        if ea.qubit_out == eb.qubit_out && ea.radiation_label == eb.radiation_label
                        {
                            overlap += ea.amplitude.conj() * eb.amplitude;
                        }
                    }
                }
                if overlap.norm() > tolerance {
                    return Err(ProcessError::RowsNotOrthogonal {
                        row_a: a,
                        row_b: b,
                        overlap: overlap.norm().as_f64(),
                    });
                }
            }
        }
        Ok(Self {
            name: name.into(),
            rows,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rows(&self) -> &[Vec<ProcessEntry<T>>; 4] {
        &self.rows
    }

    /// Distinct radiation labels used by the table, ascending.
    pub fn radiation_labels(&self) -> Vec<u32> {
        let mut labels: Vec<u32> = self
            .rows
            .iter()
            .flatten()
            .map(|e| e.radiation_label)
            .collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// The occupation-number space the output state lives on: one
    /// accessible mode for the qubit excitation, one inaccessible mode per
    /// radiation label.
    pub fn fock_space(&self) -> FockSpace {
        let labels = self.radiation_labels();
        let partition = AccessibilityPartition::new(1 + labels.len(), [0]).expect("mode 0 exists");
        FockSpace::new(partition, 2)
    }
}

/// The three canonical tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinProcess {
    /// Outcome depends only on the photon; both results equally likely.
    Uniform,
    /// Outcome depends only on the qubit; projects onto its dominant
    /// amplitude.
    Maximum,
    /// Outcome mixes both; frequencies follow the squared qubit amplitudes.
    Born,
}

impl BuiltinProcess {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinProcess::Uniform => "uniform",
            BuiltinProcess::Maximum => "maximum",
            BuiltinProcess::Born => "born",
        }
    }
}

/// Builds one of the builtin tables.
pub fn builtin_process<T: Real>(which: BuiltinProcess) -> ScatteringProcess<T> {
    let one = Complex::new(T::one(), T::zero());
    let entry = |qubit_out: u8, label: u32, amplitude: Complex<T>| ProcessEntry {
        qubit_out,
        radiation_label: label,
        amplitude,
    };
    let rows = match which {
        BuiltinProcess::Uniform => [
            vec![entry(0, 1, one)],
            vec![entry(0, 2, one)],
            vec![entry(1, 3, one)],
            vec![entry(1, 4, one)],
        ],
        BuiltinProcess::Maximum => [
            vec![entry(0, 1, one)],
            vec![entry(1, 2, one)],
            vec![entry(0, 3, one)],
            vec![entry(1, 4, one)],
        ],
        BuiltinProcess::Born => {
            let s = Complex::new(T::from_f64_lossy(0.5).sqrt(), T::zero());
            [
                vec![entry(0, 1, one)],
                vec![entry(1, 2, s), entry(0, 3, s)],
                vec![entry(0, 4, s), entry(1, 5, s)],
                vec![entry(1, 6, one)],
            ]
        }
    };
    ScatteringProcess::new(which.name(), rows).expect("builtin tables are unitary")
}

/// Expands the product input state through the table into the global
/// occupation-number state: the accessible mode holds the outgoing qubit,
/// and each output term occupies the inaccessible mode of its radiation
/// label. The squared norm is `(photon norm)^2 * (qubit norm)^2`.
pub fn scatter_global<T: Real>(
    process: &ScatteringProcess<T>,
    photon: &PhotonState<T>,
    qubit: &QubitState<T>,
) -> FockStateVector<T> {
    let labels = process.radiation_labels();
    let mode_of = |label: u32| 1 + labels.binary_search(&label).expect("label is listed");
    let space = process.fock_space();
    let modes = space.single_particle_dim();
    let mut out = FockStateVector::new(space);

    let photon_amp = [photon.alpha, photon.beta];
    let qubit_amp = [qubit.a, qubit.b];
    for p in 0..2 {
        for q in 0..2 {
            let coeff = photon_amp[p] * qubit_amp[q];
            if coeff.norm_sqr() == T::zero() {
                continue;
            }
            for entry in &process.rows()[2 * p + q] {
                let mut occ = vec![0u32; modes];
                occ[0] = entry.qubit_out as u32;
                occ[mode_of(entry.radiation_label)] = 1;
                out.add_amplitude(&occ, coeff * entry.amplitude)
                    .expect("scatter terms respect the truncation");
            }
        }
    }
    out
}

/// Diagonal weights of the stripped output state on the local qubit basis:
/// `(weight of outcome 0, weight of outcome 1)`.
pub fn stripped_weights<T: Real>(
    process: &ScatteringProcess<T>,
    photon: &PhotonState<T>,
    qubit: &QubitState<T>,
) -> (T, T) {
    let global = scatter_global(process, photon, qubit);
    let stripped = crate::fock::strip(&global);
    let w0 = stripped.weight_of(&[0]).expect("qubit mode empty");
    let w1 = stripped.weight_of(&[1]).expect("qubit mode occupied");
    (w0, w1)
}

/// Locally perceived result of one scattering event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Zero,
    One,
}

/// Outcome plus the two stripped weights behind the decision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalOutcome<T> {
    pub outcome: Outcome,
    pub weight_zero: T,
    pub weight_one: T,
}

/// Runs the full pipeline (scatter, strip, compare weights) and returns the
/// dominant outcome. Ties within `1e-12` relative are an error.
pub fn local_outcome<T: Real>(
    process: &ScatteringProcess<T>,
    photon: &PhotonState<T>,
    qubit: &QubitState<T>,
) -> Result<LocalOutcome<T>, TieOutcome> {
    let (weight_zero, weight_one) = stripped_weights(process, photon, qubit);
    let tolerance = T::from_f64_lossy(tol::OUTCOME_TIE_RELATIVE);
    if (weight_zero - weight_one).abs() <= tolerance * weight_zero.max(weight_one) {
        return Err(TieOutcome {
            weight_zero: weight_zero.as_f64(),
            weight_one: weight_one.as_f64(),
            tolerance: tol::OUTCOME_TIE_RELATIVE,
        });
    }
    let outcome = if weight_zero > weight_one {
        Outcome::Zero
    } else {
        Outcome::One
    };
    Ok(LocalOutcome {
        outcome,
        weight_zero,
        weight_one,
    })
}

/// Born frequencies of a qubit: `(|a|^2, |b|^2) / (|a|^2 + |b|^2)`.
pub fn born_probabilities<T: Real>(qubit: &QubitState<T>) -> (T, T) {
    let a2 = qubit.a.norm_sqr();
    let b2 = qubit.b.norm_sqr();
    let total = a2 + b2;
    (a2 / total, b2 / total)
}

/// Draws a photon with independent standard-complex-Gaussian amplitudes.
/// The construction is invariant under SU(2) changes of the polarization
/// basis; magnitudes are Rayleigh distributed. The measure-zero draw with
/// both magnitudes below `1e-12` is rejected and redrawn.
pub fn sample_photon<T: Real, R: Rng + ?Sized>(rng: &mut R) -> PhotonState<T> {
    let floor = T::from_f64_lossy(tol::PHOTON_REDRAW_ABS);
    loop {
        let (g1, g2) = standard_normal_pair(rng);
        let (g3, g4) = standard_normal_pair(rng);
        let alpha = Complex::new(g1, g2);
        let beta = Complex::new(g3, g4);
        if alpha.norm() < floor && beta.norm() < floor {
            continue;
        }
        return PhotonState { alpha, beta };
    }
}

/// Numerically evaluates the probability that `|a| |alpha| > |b| |beta|`
/// for independent Rayleigh magnitudes, as the double integral of
/// `f(x1) f(x2)` with `f(x) = x exp(-x^2 / 2)` over
/// `0 < x2 < ratio * x1`, by nested adaptive quadrature with an absolute
/// error budget of `1e-8`.
///
/// `ratio` is `|a| / |b|`. This is an independent cross-check of the closed
/// form `ratio^2 / (1 + ratio^2)`; it never uses that expression.
pub fn rayleigh_oracle<T: Real>(ratio: T) -> Result<T, QuadratureFailure> {
    // Rayleigh density mass beyond 12 is below 1e-31; safe truncation.
    let cutoff = T::from_f64_lossy(12.0);
    let density = |x: T| x * (-x * x * T::from_f64_lossy(0.5)).exp();
    let inner_failure = std::cell::Cell::new(None::<QuadratureFailure>);
    let integrand = |x1: T| {
        let upper = (ratio * x1).min(cutoff);
        if upper <= T::zero() {
            return T::zero();
        }
        match adaptive_simpson(&density, T::zero(), upper, T::from_f64_lossy(1e-12)) {
            Ok(inner) => density(x1) * inner,
            Err(failure) => {
                inner_failure.set(Some(failure));
                T::zero()
            }
        }
    };
    let value = adaptive_simpson(&integrand, T::zero(), cutoff, T::from_f64_lossy(1e-9))?;
    if let Some(failure) = inner_failure.take() {
        return Err(failure);
    }
    Ok(value)
}

/// Tally of a Monte Carlo scattering run.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeStatistics {
    pub trials: u64,
    pub count_zero: u64,
    pub count_one: u64,
    pub ties: u64,
    /// Frequencies among non-tied trials.
    pub freq_zero: f64,
    pub freq_one: f64,
    /// Binomial standard error `sqrt(f0 f1 / n)` of the zero frequency.
    pub standard_error: f64,
}

/// Draws one photon per trial (substream `seed; trial`), applies the full
/// pipeline, and tallies outcomes. Ties are counted and excluded from the
/// frequencies. Deterministic for a fixed seed, independent of trial
/// execution order.
pub fn run_trials<T: Real>(
    process: &ScatteringProcess<T>,
    qubit: &QubitState<T>,
    n_trials: u64,
    seed: u64,
) -> OutcomeStatistics {
    assert!(n_trials >= 1, "at least one trial");
    let mut count_zero = 0u64;
    let mut count_one = 0u64;
    let mut ties = 0u64;
    for trial in 0..n_trials {
        let mut rng = substream(seed, trial);
        let photon = sample_photon::<T, _>(&mut rng);
        match local_outcome(process, &photon, qubit) {
            Ok(local) => match local.outcome {
                Outcome::Zero => count_zero += 1,
                Outcome::One => count_one += 1,
            },
            Err(_) => ties += 1,
        }
    }
    let effective = (count_zero + count_one).max(1) as f64;
    let freq_zero = count_zero as f64 / effective;
    let freq_one = count_one as f64 / effective;
    OutcomeStatistics {
        trials: n_trials,
        count_zero,
        count_one,
        ties,
        freq_zero,
        freq_one,
        standard_error: (freq_zero * freq_one / effective).sqrt(),
    }
}

//! Two-level atom interacting with circularly polarized photons: a concrete
//! scattering table that generates Born statistics.
//!
//! The qubit is an electronic transition that changes angular momentum
//! (ground state `|0>`, excited state `|1>`). A photon whose circular
//! polarization carries the wrong angular momentum for the transition passes
//! through unchanged. A photon with the matching angular momentum either
//! drives the transition or scatters off in a new direction, with equal
//! amplitude by default:
//!
//! * wrong-helicity photon on `|0>`: pass-through, outcome 0.
//! * matching photon on `|0>`: absorbed (excites to `|1>`, no outgoing
//!   photon) or scattered with `|0>` kept.
//! * matching photon on `|1>`: pass-through, outcome 1.
//! * opposite photon on `|1>`: stimulated two-photon emission (drops to
//!   `|0>`) or scattered with `|1>` kept.
//!
//! Every output radiation state (pass-through, scattered, two-photon,
//! absorbed-photon relative vacuum) is locally inaccessible and mutually
//! orthogonal, so each is one abstract radiation label; their inner
//! structure never survives the stripping. In the table's photon basis
//! order (wrong-helicity first) the stripped weights at equal branch
//! amplitudes coincide exactly with the builtin Born table's, and the
//! relative phase between the two branch entries cancels in the reduction.
//!
//! `branch_amplitude` is exposed because the equal-amplitude choice is an
//! assumption; moving it away from `1/sqrt(2)` maps out how the statistics
//! deviate from the Born rule.

use num_complex::Complex;

use crate::float::Real;
use crate::rng::substream;
use crate::scattering::{
    local_outcome, sample_photon, Outcome, ProcessEntry, ProcessError, QubitState,
    ScatteringProcess,
};
use crate::stats::binomial_stderr;

/// Radiation label of the unchanged wrong-helicity photon leaving `|0>`.
pub const LABEL_PASS_GROUND: u32 = 1;
/// Label of the two-photon state from stimulated emission.
pub const LABEL_TWO_PHOTON: u32 = 2;
/// Label of the scattered photon with the qubit left in `|1>`.
pub const LABEL_SCATTERED_EXCITED: u32 = 3;
/// Label of the absorbed-photon relative vacuum (qubit excited).
pub const LABEL_ABSORBED: u32 = 4;
/// Label of the scattered photon with the qubit left in `|0>`.
pub const LABEL_SCATTERED_GROUND: u32 = 5;
/// Label of the unchanged matching-helicity photon leaving `|1>`.
pub const LABEL_PASS_EXCITED: u32 = 6;

/// The atom-photon realization: a [`ScatteringProcess`] over the circular
/// polarization basis, with the branch amplitude kept for reporting.
#[derive(Clone, Debug)]
pub struct AtomPhotonProcess<T> {
    process: ScatteringProcess<T>,
    branch_amplitude: T,
}

impl<T: Real> AtomPhotonProcess<T> {
    pub fn process(&self) -> &ScatteringProcess<T> {
        &self.process
    }

    pub fn branch_amplitude(&self) -> T {
        self.branch_amplitude
    }
}

/// Builds the four-row atom-photon table. `branch_amplitude` is the weight
/// of the state-changing option (absorption or stimulated emission) in the
/// two split rows; the default from symmetry is `1/sqrt(2)`.
///
/// Photon basis order: index 0 is the polarization that passes through on
/// the ground state (wrong angular momentum for the transition), index 1
/// the one that drives it.
pub fn build_atom_photon<T: Real>(
    branch_amplitude: T,
) -> Result<AtomPhotonProcess<T>, ProcessError> {
    if branch_amplitude <= T::zero() || branch_amplitude >= T::one() {
        return Err(ProcessError::InvalidBranchAmplitude {
            value: branch_amplitude.as_f64(),
        });
    }
    let keep = (T::one() - branch_amplitude * branch_amplitude).sqrt();
    let one = Complex::new(T::one(), T::zero());
    let change = Complex::new(branch_amplitude, T::zero());
    let stay = Complex::new(keep, T::zero());
    let entry = |qubit_out: u8, label: u32, amplitude: Complex<T>| ProcessEntry {
        qubit_out,
        radiation_label: label,
        amplitude,
    };
    let rows = [
        // wrong helicity on |0>: pass-through
        vec![entry(0, LABEL_PASS_GROUND, one)],
        // wrong helicity on |1>: stimulated emission or scatter
        vec![
            entry(0, LABEL_TWO_PHOTON, change),
            entry(1, LABEL_SCATTERED_EXCITED, stay),
        ],
        // matching helicity on |0>: absorption or scatter
        vec![
            entry(1, LABEL_ABSORBED, change),
            entry(0, LABEL_SCATTERED_GROUND, stay),
        ],
        // matching helicity on |1>: pass-through
        vec![entry(1, LABEL_PASS_EXCITED, one)],
    ];
    let process = ScatteringProcess::new("atom-photon", rows)?;
    Ok(AtomPhotonProcess {
        process,
        branch_amplitude,
    })
}

/// Default equal-amplitude table.
pub fn default_atom_photon<T: Real>() -> AtomPhotonProcess<T> {
    build_atom_photon(T::from_f64_lossy(0.5).sqrt()).expect("1/sqrt(2) is in range")
}

/// One grid point of a Born-equivalence certification run.
#[derive(Clone, Debug)]
pub struct EquivalencePoint {
    /// `|a|^2 / (|a|^2 + |b|^2)` of the grid qubit.
    pub expected: f64,
    pub frequency: f64,
    pub sigma: f64,
    pub ties: u64,
    pub pass: bool,
}

/// Grid certification result; passes iff every point sits within four
/// binomial sigmas of the Born frequency.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub trials_per_point: u64,
    pub points: Vec<EquivalencePoint>,
    pub passed: bool,
}

/// Monte Carlo check that the process reproduces Born frequencies on a
/// qubit grid. Each grid point runs `n_trials` seeded trials (substreams
/// `seed; point * n_trials + trial`).
pub fn certify_born_equivalence<T: Real>(
    process: &AtomPhotonProcess<T>,
    qubit_grid: &[QubitState<T>],
    n_trials: u64,
    seed: u64,
) -> EquivalenceReport {
    let mut points = Vec::with_capacity(qubit_grid.len());
    for (index, qubit) in qubit_grid.iter().enumerate() {
        let expected = {
            let (p0, _) = crate::scattering::born_probabilities(qubit);
            p0.as_f64()
        };
        let mut zeros = 0u64;
        let mut ones = 0u64;
        let mut ties = 0u64;
        for trial in 0..n_trials {
            let mut rng = substream(seed, index as u64 * n_trials + trial);
            let photon = sample_photon::<T, _>(&mut rng);
            match local_outcome(process.process(), &photon, qubit) {
                Ok(local) => match local.outcome {
                    Outcome::Zero => zeros += 1,
                    Outcome::One => ones += 1,
                },
                Err(_) => ties += 1,
            }
        }
        let effective = (zeros + ones).max(1);
        let frequency = zeros as f64 / effective as f64;
        let sigma = binomial_stderr(expected, effective).max(f64::EPSILON);
        let pass = (frequency - expected).abs() <= 4.0 * sigma;
        points.push(EquivalencePoint {
            expected,
            frequency,
            sigma,
            ties,
            pass,
        });
    }
    EquivalenceReport {
        trials_per_point: n_trials,
        points: points.clone(),
        passed: points.iter().all(|p| p.pass),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{builtin_process, stripped_weights, BuiltinProcess, PhotonState};

    fn qubit(a: f64, b: f64) -> QubitState<f64> {
        QubitState::from_reals(a, b).unwrap()
    }

    #[test]
    fn default_table_is_unitary_with_expected_shape() {
        let atom = default_atom_photon::<f64>();
        let rows = atom.process().rows();
        assert_eq!(rows[0].len(), 1);
        assert_eq!(rows[3].len(), 1);
        assert_eq!(rows[1].len(), 2);
        assert_eq!(rows[2].len(), 2);
        assert_eq!(rows[0][0].qubit_out, 0);
        assert_eq!(rows[3][0].qubit_out, 1);
    }

    #[test]
    fn branch_amplitude_domain_is_checked() {
        assert!(build_atom_photon(0.0f64).is_err());
        assert!(build_atom_photon(1.0f64).is_err());
        assert!(build_atom_photon(0.9f64).is_ok());
    }

    #[test]
    fn equal_amplitude_weights_match_the_born_table() {
        let atom = default_atom_photon::<f64>();
        let born = builtin_process::<f64>(BuiltinProcess::Born);
        for i in 1..=9 {
            for j in 1..=9 {
                let s = i as f64 / 10.0;
                let t = j as f64 / 10.0;
                let photon = PhotonState::from_reals(s.sqrt(), (1.0 - s).sqrt()).unwrap();
                let q = qubit(t.sqrt(), (1.0 - t).sqrt());
                let (a0, a1) = stripped_weights(atom.process(), &photon, &q);
                let (b0, b1) = stripped_weights(&born, &photon, &q);
                assert!((a0 - b0).abs() < 1e-12, "zero weight at ({s},{t})");
                assert!((a1 - b1).abs() < 1e-12, "one weight at ({s},{t})");
            }
        }
    }

    #[test]
    fn relative_branch_phase_cancels_in_the_weights() {
        // same table but with a phase on the state-changing entries
        let amp = 0.5f64.sqrt();
        let phase = Complex::from_polar(amp, 1.234);
        let one = Complex::new(1.0, 0.0);
        let stay = Complex::new(amp, 0.0);
        let entry = |qubit_out: u8, label: u32, amplitude: Complex<f64>| ProcessEntry {
            qubit_out,
            radiation_label: label,
            amplitude,
        };
        let rotated = ScatteringProcess::new(
            "atom-photon-rotated",
            [
                vec![entry(0, LABEL_PASS_GROUND, one)],
                vec![
                    entry(0, LABEL_TWO_PHOTON, phase),
                    entry(1, LABEL_SCATTERED_EXCITED, stay),
                ],
                vec![
                    entry(1, LABEL_ABSORBED, phase),
                    entry(0, LABEL_SCATTERED_GROUND, stay),
                ],
                vec![entry(1, LABEL_PASS_EXCITED, one)],
            ],
        )
        .unwrap();
        let atom = default_atom_photon::<f64>();
        let photon = PhotonState::new(Complex::new(0.4, 0.6), Complex::new(-0.3, 0.2)).unwrap();
        let q = QubitState::new(Complex::new(0.8, -0.1), Complex::new(0.2, 0.5)).unwrap();
        let (a0, a1) = stripped_weights(atom.process(), &photon, &q);
        let (r0, r1) = stripped_weights(&rotated, &photon, &q);
        assert!((a0 - r0).abs() < 1e-13);
        assert!((a1 - r1).abs() < 1e-13);
    }

    #[test]
    fn wrong_helicity_inputs_pass_through_deterministically() {
        let atom = default_atom_photon::<f64>();
        // photon entirely on the wrong-helicity component, ground qubit
        let photon = PhotonState::from_reals(1.7, 0.0).unwrap();
        let local = local_outcome(atom.process(), &photon, &qubit(1.0, 0.0)).unwrap();
        assert_eq!(local.outcome, Outcome::Zero);
        // matching-helicity photon on the excited qubit
        let photon = PhotonState::from_reals(0.0, 0.9).unwrap();
        let local = local_outcome(atom.process(), &photon, &qubit(0.0, 1.0)).unwrap();
        assert_eq!(local.outcome, Outcome::One);
    }

    #[test]
    fn skewed_amplitude_distorts_the_statistics() {
        let q = qubit(0.7f64.sqrt(), 0.3f64.sqrt());
        for amp in [0.9f64, 0.95] {
            let atom = build_atom_photon(amp).unwrap();
            let report = certify_born_equivalence(&atom, &[q], 20_000, 4242);
            assert!(!report.passed, "amp {amp} should deviate measurably");
            assert!(!report.points[0].pass);
        }
    }

    #[test]
    fn default_amplitude_certifies_on_a_small_grid() {
        let atom = default_atom_photon::<f64>();
        let grid: Vec<QubitState<f64>> = (1..=9)
            .map(|i| {
                let a2 = i as f64 / 10.0;
                qubit(a2.sqrt(), (1.0 - a2).sqrt())
            })
            .collect();
        let report = certify_born_equivalence(&atom, &grid, 20_000, 7);
        assert!(report.passed, "points: {:?}", report.points);
    }
}

//! Cross-module invariants checked against independent brute-force oracles.

mod common;

use common::*;
use num_complex::Complex;
use proptest::prelude::*;

use bornsim_core::branching::{born_event, born_event_rescattered, BranchTree};
use bornsim_core::fock::{strip, AccessibilityPartition, FockSpace, FockStateVector};
use bornsim_core::rng::{master, standard_normal_pair, substream};
use bornsim_core::scattering::{
    builtin_process, sample_photon, scatter_global, stripped_weights, BuiltinProcess, PhotonState,
    QubitState,
};
use bornsim_core::statespace::{tensor, StateVector};
use bornsim_core::tol;

#[test]
fn strip_equals_partial_trace_on_random_states() {
    let mut rng = master(0x5712);
    for case in 0..60 {
        let psi = random_fock_state(4, 3, &mut rng);
        let stripped = strip(&psi);
        let oracle = partial_trace_oracle(&psi);
        let diff = frobenius_diff_plain(&oracle, stripped.operator().matrix());
        assert!(diff < 1e-10, "case {case}: frobenius diff {diff}");
        assert!((stripped.trace() - psi.norm_sqr()).abs() < 1e-10);
    }
}

#[test]
fn scatter_outputs_strip_to_their_partial_trace() {
    // the scattering pipeline's stripped weights agree with the dense
    // embed-and-trace computation
    let mut rng = master(0xaa17);
    for which in [
        BuiltinProcess::Uniform,
        BuiltinProcess::Maximum,
        BuiltinProcess::Born,
    ] {
        let process = builtin_process::<f64>(which);
        for _ in 0..10 {
            let photon = sample_photon::<f64, _>(&mut rng);
            let (g1, g2) = standard_normal_pair(&mut rng);
            let (g3, g4) = standard_normal_pair(&mut rng);
            let qubit = QubitState::new(Complex::new(g1, g2), Complex::new(g3, g4))
                .expect("gaussian qubit is nonzero");
            let global = scatter_global(&process, &photon, &qubit);
            let stripped = strip(&global);
            let oracle = partial_trace_oracle(&global);
            assert!(frobenius_diff_plain(&oracle, stripped.operator().matrix()) < 1e-10);
            let (w0, w1) = stripped_weights(&process, &photon, &qubit);
            let i0 = stripped.basis_index(&[0]).unwrap();
            let i1 = stripped.basis_index(&[1]).unwrap();
            assert!((oracle[i0][i0].re - w0).abs() < 1e-10);
            assert!((oracle[i1][i1].re - w1).abs() < 1e-10);
        }
    }
}

#[test]
fn dominant_projection_matches_matrix_powers() {
    let mut rng = master(0x90f3);
    for case in 0..30 {
        let dim = 2 + (case % 5);
        let op = random_gapped_operator(dim, 0.85, &mut rng);
        let (_, projector) = op
            .dominant_eigenprojection(tol::TIE_RELATIVE)
            .expect("gapped spectrum");
        let oracle = normalized_power_oracle(&cmatrix_to_plain(op.matrix()), 200);
        let diff = max_abs_diff_plain(&oracle, projector.matrix());
        assert!(diff < 1e-8, "case {case}: max diff {diff}");
    }
}

/// Flat branch trees against the full occupation-number pipeline: the tree
/// weights must equal the diagonal of the stripped global state in which
/// every scattered qubit is kept as an accessible record mode and every
/// event uses six fresh radiation modes.
#[test]
fn branch_tree_weights_match_the_global_pipeline() {
    let events = 2usize;
    let prep = QubitState::from_reals(0.6, 0.8).unwrap();
    let mut rng = master(0x77aa);

    for _ in 0..5 {
        let photons: Vec<PhotonState<f64>> = (0..events).map(|_| sample_photon(&mut rng)).collect();

        // flat model
        let mut tree = BranchTree::new();
        for photon in &photons {
            tree = born_event(&tree, &prep, photon);
        }

        // global model: accessible modes = one record qubit per event,
        // inaccessible modes = 6 radiation labels per event
        let accessible = events;
        let modes = accessible + 6 * events;
        let space = FockSpace::new(
            AccessibilityPartition::new(modes, 0..accessible).unwrap(),
            2 * events as u32,
        );
        let born = builtin_process::<f64>(BuiltinProcess::Born);
        let mut terms: Vec<(Vec<u32>, Complex<f64>)> =
            vec![(vec![0u32; modes], Complex::new(1.0, 0.0))];
        for (event, photon) in photons.iter().enumerate() {
            let photon_amp = [photon.alpha, photon.beta];
            let qubit_amp = [prep.a, prep.b];
            let mut next = Vec::new();
            for (occ, coeff) in &terms {
                for p in 0..2usize {
                    for q in 0..2usize {
                        let weight = photon_amp[p] * qubit_amp[q];
                        for entry in &born.rows()[2 * p + q] {
                            let mut occ = occ.clone();
                            occ[event] = entry.qubit_out as u32;
                            occ[accessible + 6 * event + (entry.radiation_label - 1) as usize] = 1;
                            next.push((occ, coeff * weight * entry.amplitude));
                        }
                    }
                }
            }
            terms = next;
        }
        let mut global = FockStateVector::new(space);
        for (occ, amp) in terms {
            global.add_amplitude(&occ, amp).unwrap();
        }
        let stripped = strip(&global);

        for branch in tree.branches() {
            let record: Vec<u32> = branch.record.iter().map(|&b| b as u32).collect();
            let weight = stripped.weight_of(&record).unwrap();
            assert!(
                (weight - branch.weight).abs() < 1e-12 * branch.weight.max(1e-30),
                "record {:?}: {} vs {}",
                branch.record,
                weight,
                branch.weight
            );
        }
    }
}

/// Same cross-check for the rescattering mode: one accessible system mode,
/// one accessible memory mode per event (the recording map copies the
/// outgoing qubit), six fresh radiation modes per event.
#[test]
fn rescattered_tree_weights_match_the_global_pipeline() {
    let events = 2usize;
    let prep = QubitState::from_reals(0.5f64.sqrt(), 0.5f64.sqrt()).unwrap();
    let mut rng = master(0x31cc);

    for _ in 0..5 {
        let photons: Vec<PhotonState<f64>> = (0..events).map(|_| sample_photon(&mut rng)).collect();

        let mut tree = BranchTree::new();
        for photon in &photons {
            tree = born_event_rescattered(&tree, &prep, photon);
        }

        // modes: 0 = system, 1..=events = memory, then radiation
        let accessible = 1 + events;
        let modes = accessible + 6 * events;
        let space = FockSpace::new(
            AccessibilityPartition::new(modes, 0..accessible).unwrap(),
            (1 + 2 * events) as u32,
        );
        let born = builtin_process::<f64>(BuiltinProcess::Born);
        let mut terms: Vec<(Vec<u32>, Complex<f64>)> = vec![
            {
                let occ = vec![0u32; modes];
                (occ, prep.a)
            },
            {
                let mut occ = vec![0u32; modes];
                occ[0] = 1;
                (occ, prep.b)
            },
        ];
        for (event, photon) in photons.iter().enumerate() {
            let photon_amp = [photon.alpha, photon.beta];
            let mut next = Vec::new();
            for (occ, coeff) in &terms {
                let system = occ[0] as usize; // basis state entering the event
                for p in 0..2usize {
                    let weight = photon_amp[p];
                    for entry in &born.rows()[2 * p + system] {
                        let mut occ = occ.clone();
                        occ[0] = entry.qubit_out as u32;
                        occ[1 + event] = entry.qubit_out as u32; // memory copy
                        occ[accessible + 6 * event + (entry.radiation_label - 1) as usize] = 1;
                        next.push((occ, coeff * weight * entry.amplitude));
                    }
                }
            }
            terms = next;
        }
        let mut global = FockStateVector::new(space);
        for (occ, amp) in terms {
            global.add_amplitude(&occ, amp).unwrap();
        }
        let stripped = strip(&global);

        for branch in tree.branches() {
            let mut acc = vec![0u32; accessible];
            acc[0] = *branch.record.last().unwrap() as u32;
            for (event, &bit) in branch.record.iter().enumerate() {
                acc[1 + event] = bit as u32;
            }
            let weight = stripped.weight_of(&acc).unwrap();
            assert!(
                (weight - branch.weight).abs() < 1e-12 * branch.weight.max(1e-30),
                "record {:?}: {} vs {}",
                branch.record,
                weight,
                branch.weight
            );
        }
    }
}

#[test]
fn sampled_photon_magnitudes_are_rayleigh() {
    // |alpha| of the Gaussian photon model follows the CDF 1 - exp(-x^2/2);
    // Kolmogorov-Smirnov at significance 0.001, plus zero-mean checks.
    let n = 100_000usize;
    let mut rng = master(0x2f2f);
    let mut magnitudes = Vec::with_capacity(n);
    let mut sum_re = 0.0f64;
    let mut sum_im = 0.0f64;
    for _ in 0..n {
        let photon = sample_photon::<f64, _>(&mut rng);
        magnitudes.push(photon.alpha.norm());
        sum_re += photon.alpha.re;
        sum_im += photon.alpha.im;
    }
    let d = bornsim_core::stats::ks_statistic(&mut magnitudes, |x| 1.0 - (-0.5 * x * x).exp());
    let critical = bornsim_core::stats::ks_critical_value(n, 0.001);
    assert!(d < critical, "KS statistic {d} exceeds {critical}");
    // component means are within four sigma of zero (sigma = 1/sqrt(n))
    let four_sigma = 4.0 / (n as f64).sqrt();
    assert!((sum_re / n as f64).abs() < four_sigma);
    assert!((sum_im / n as f64).abs() < four_sigma);
}

#[test]
fn quadrature_oracle_agrees_with_the_born_formula() {
    for ratio in [0.1f64, 0.5, 1.0, 2.0, 10.0] {
        let quadrature: f64 = bornsim_core::scattering::rayleigh_oracle(ratio).unwrap();
        let qubit = QubitState::from_reals(ratio, 1.0).unwrap();
        let (p0, _) = bornsim_core::scattering::born_probabilities(&qubit);
        assert!(
            (quadrature - p0).abs() < 1e-7,
            "ratio {ratio}: {quadrature} vs {p0}"
        );
    }
}

#[test]
fn rescatter_rewrites_rarely_reach_deep_history() {
    // History rewrites keep happening at a roughly constant per-event rate
    // in rescattering mode, but their reach decays geometrically: a switch
    // that resurfaces a branch hidden for k events becomes rarer with every
    // extra event of lookback. This is the quantitative form of "the
    // subjective history is stable after a few events".
    let prep = QubitState::from_reals(0.9f64.sqrt(), 0.1f64.sqrt()).unwrap();
    let stats = bornsim_core::branching::run_history_experiment(
        &prep,
        10,
        4_000,
        0x51de,
        bornsim_core::branching::EventMode::RescatterPrior,
    )
    .unwrap();
    let lookback = &stats.switch_lookback_counts;
    for k in 0..7 {
        assert!(
            lookback[k + 1] < lookback[k],
            "lookback histogram not decaying at {k}: {lookback:?}"
        );
    }
    let deepest: u64 = lookback[6..].iter().sum();
    assert!(
        (deepest as f64) < 0.5 * lookback[0] as f64,
        "deep rewrites too common: {lookback:?}"
    );
}

#[test]
fn born_event_multiplies_total_weight_by_the_input_norms() {
    let mut rng = master(0x18e2);
    for _ in 0..20 {
        let (g1, g2) = standard_normal_pair(&mut rng);
        let (g3, g4) = standard_normal_pair(&mut rng);
        let prep = QubitState::new(Complex::new(g1, g2), Complex::new(g3, g4)).unwrap();
        let photon = sample_photon::<f64, _>(&mut rng);
        let before = BranchTree::new();
        let after = born_event(&before, &prep, &photon);
        let factor = photon.norm_sqr() * prep.norm_sqr();
        let relative = (after.total_weight() - before.total_weight() * factor).abs() / factor;
        assert!(relative < 1e-9);
    }
}

#[test]
fn run_trials_merge_is_order_independent() {
    // per-trial substreams make the tally a plain sum; two disjoint halves
    // must add up to the full run
    let born = builtin_process::<f64>(BuiltinProcess::Born);
    let qubit = QubitState::from_reals(0.3f64.sqrt(), 0.7f64.sqrt()).unwrap();
    let full = bornsim_core::scattering::run_trials(&born, &qubit, 400, 31);
    let mut zero = 0u64;
    let mut one = 0u64;
    for trial in 0..400u64 {
        let mut rng = substream(31, trial);
        let photon = sample_photon::<f64, _>(&mut rng);
        if let Ok(local) = bornsim_core::scattering::local_outcome(&born, &photon, &qubit) {
            match local.outcome {
                bornsim_core::scattering::Outcome::Zero => zero += 1,
                bornsim_core::scattering::Outcome::One => one += 1,
            }
        }
    }
    assert_eq!(full.count_zero, zero);
    assert_eq!(full.count_one, one);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_norms_multiply(
        re1 in proptest::collection::vec(-3.0f64..3.0, 2..5),
        im1 in proptest::collection::vec(-3.0f64..3.0, 2..5),
        re2 in proptest::collection::vec(-3.0f64..3.0, 2..5),
        im2 in proptest::collection::vec(-3.0f64..3.0, 2..5),
    ) {
        let make = |re: &[f64], im: &[f64]| {
            let n = re.len().min(im.len());
            StateVector::new(
                (0..n).map(|i| Complex::new(re[i], im[i])).collect(),
            ).unwrap()
        };
        let a = make(&re1, &im1);
        let b = make(&re2, &im2);
        let t = tensor(&a, &b);
        eq_norm(t.norm_sqr(), a.norm_sqr() * b.norm_sqr())?;
    }

    #[test]
    fn stripped_weights_sum_to_the_input_norm(
        ar in -2.0f64..2.0, ai in -2.0f64..2.0,
        br in -2.0f64..2.0, bi in -2.0f64..2.0,
        pr in -2.0f64..2.0, pi in -2.0f64..2.0,
        qr in -2.0f64..2.0, qi in -2.0f64..2.0,
    ) {
        prop_assume!(ar * ar + ai * ai + br * br + bi * bi > 1e-6);
        prop_assume!(pr * pr + pi * pi + qr * qr + qi * qi > 1e-6);
        let qubit = QubitState::new(Complex::new(ar, ai), Complex::new(br, bi)).unwrap();
        let photon = PhotonState::new(Complex::new(pr, pi), Complex::new(qr, qi)).unwrap();
        for which in [BuiltinProcess::Uniform, BuiltinProcess::Maximum, BuiltinProcess::Born] {
            let process = builtin_process::<f64>(which);
            let (w0, w1) = stripped_weights(&process, &photon, &qubit);
            let expected = photon.norm_sqr() * qubit.norm_sqr();
            prop_assert!((w0 + w1 - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn strip_trace_equals_norm(seed in 0u64..10_000) {
        let mut rng = master(seed);
        let psi = random_fock_state(4, 3, &mut rng);
        let stripped = strip(&psi);
        prop_assert!((stripped.trace() - psi.norm_sqr()).abs() < 1e-10);
    }
}

fn eq_norm(left: f64, right: f64) -> Result<(), proptest::test_runner::TestCaseError> {
    if (left - right).abs() <= 1e-12 * right.abs().max(1.0) {
        Ok(())
    } else {
        Err(proptest::test_runner::TestCaseError::fail(format!(
            "{left} != {right}"
        )))
    }
}

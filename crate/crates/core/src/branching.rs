//! Repeated Born scattering with recorded outcomes.
//!
//! Each recorded scattering event doubles the set of branches: a branch of
//! weight `w` spawns children `(w * w0, record + [0])` and
//! `(w * w1, record + [1])`, where `w0, w1` are the stripped weights of the
//! event. The observer's subjective history is the record of the branch of
//! greatest weight, and a *switch* happens when the new dominant branch does
//! not descend from the previous one, silently rewriting the remembered
//! past.
//!
//! Two event modes exist because they probe different claims:
//!
//! * [`born_event`] re-prepares a fresh qubit in the same state for every
//!   event. The event weights are then shared by all branches, so the total
//!   weight of a record factorizes over events. This is the right mode for
//!   statistics: the dominant record collects one independent Born-rule draw
//!   per event. The factorization also means the previous dominant record is
//!   always a prefix of the new one - switches cannot occur in this mode.
//! * [`born_event_rescattered`] scatters the branch's own current qubit
//!   (its last recorded outcome) again instead of re-preparing. Weights
//!   become branch-dependent, and the dominant lineage can jump to a
//!   formerly suppressed branch, which is exactly the switch phenomenon.
//!   The record statistics of this mode are *not* Born products; the
//!   experiment reports whatever it measures.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::float::Real;
use crate::rng::substream;
use crate::scattering::{
    builtin_process, sample_photon, stripped_weights, BuiltinProcess, PhotonState, QubitState,
};
use crate::statespace::SpectralError;
use crate::stats::{chi_square_gof, ChiSquare};
use crate::tol;

/// Branch growth is exponential; history experiments stay desk-scale below
/// this many events.
pub const MAX_EVENTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BranchError {
    #[error("{requested} events exceed the branch-tree cap of {max}")]
    TooManyEvents { requested: usize, max: usize },
    #[error(transparent)]
    Degenerate(#[from] SpectralError),
}

/// One branch: unnormalized weight and the recorded outcome history,
/// oldest first.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch<T> {
    pub weight: T,
    pub record: Vec<u8>,
}

/// Weighted set of branches after a number of recorded events. Always holds
/// `2^event_count` branches with pairwise distinct records.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTree<T> {
    branches: Vec<Branch<T>>,
    event_count: usize,
}

impl<T: Real> BranchTree<T> {
    /// The tree before any event: one branch of weight one, empty record.
    pub fn new() -> Self {
        Self {
            branches: vec![Branch {
                weight: T::one(),
                record: Vec::new(),
            }],
            event_count: 0,
        }
    }

    pub fn branches(&self) -> &[Branch<T>] {
        &self.branches
    }

    pub fn event_count(&self) -> usize {
        self.event_count
    }

    pub fn total_weight(&self) -> T {
        self.branches
            .iter()
            .fold(T::zero(), |acc, b| acc + b.weight)
    }

    fn split_with(&self, multipliers: impl Fn(&Branch<T>) -> (T, T)) -> Self {
        let mut branches = Vec::with_capacity(self.branches.len() * 2);
        for branch in &self.branches {
            let (w0, w1) = multipliers(branch);
            let mut zero = branch.record.clone();
            zero.push(0);
            let mut one = branch.record.clone();
            one.push(1);
            branches.push(Branch {
                weight: branch.weight * w0,
                record: zero,
            });
            branches.push(Branch {
                weight: branch.weight * w1,
                record: one,
            });
        }
        Self {
            branches,
            event_count: self.event_count + 1,
        }
    }
}

impl<T: Real> Default for BranchTree<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// One recorded Born scattering event with a freshly prepared qubit. Every
/// branch multiplies by the same stripped weight pair of
/// `(photon, preparation)`.
pub fn born_event<T: Real>(
    tree: &BranchTree<T>,
    preparation: &QubitState<T>,
    photon: &PhotonState<T>,
) -> BranchTree<T> {
    let born = builtin_process::<T>(BuiltinProcess::Born);
    let weights = stripped_weights(&born, photon, preparation);
    tree.split_with(|_| weights)
}

/// One recorded Born scattering event on each branch's own qubit: the
/// preparation state before the first event, afterwards the basis state of
/// the branch's last recorded outcome. Weight multipliers differ between
/// branches, which makes dominant-branch switches possible.
pub fn born_event_rescattered<T: Real>(
    tree: &BranchTree<T>,
    preparation: &QubitState<T>,
    photon: &PhotonState<T>,
) -> BranchTree<T> {
    let born = builtin_process::<T>(BuiltinProcess::Born);
    let from_prep = stripped_weights(&born, photon, preparation);
    let from_zero = stripped_weights(
        &born,
        photon,
        &QubitState::from_reals(T::one(), T::zero()).expect("basis state is valid"),
    );
    let from_one = stripped_weights(
        &born,
        photon,
        &QubitState::from_reals(T::zero(), T::one()).expect("basis state is valid"),
    );
    tree.split_with(|branch| match branch.record.last() {
        None => from_prep,
        Some(0) => from_zero,
        Some(_) => from_one,
    })
}

/// The branch of maximal weight. Errors when the top two weights agree
/// within `1e-12` relative.
pub fn dominant_history<T: Real>(tree: &BranchTree<T>) -> Result<&Branch<T>, SpectralError> {
    let branches = tree.branches();
    let mut best = 0usize;
    for i in 1..branches.len() {
        if branches[i].weight > branches[best].weight {
            best = i;
        }
    }
    if branches.len() > 1 {
        let mut second = T::zero();
        for (i, branch) in branches.iter().enumerate() {
            if i != best {
                second = second.max(branch.weight);
            }
        }
        let largest = branches[best].weight;
        if largest - second <= T::from_f64_lossy(tol::OUTCOME_TIE_RELATIVE) * largest {
            return Err(SpectralError::DegenerateDominant {
                largest: largest.as_f64(),
                second: second.as_f64(),
                tolerance: tol::OUTCOME_TIE_RELATIVE,
            });
        }
    }
    Ok(&branches[best])
}

/// Whether a new dominant branch abandoned the old one's history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchReport {
    pub switched: bool,
    /// Index of the first event where the records differ; `None` when the
    /// old record is a prefix of the new one.
    pub divergence_depth: Option<usize>,
}

/// Compares the previous dominant record with a newer (equal or longer)
/// one. A switch means the old record is not a prefix of the new record.
pub fn detect_switch<T: Real>(old: &Branch<T>, new: &Branch<T>) -> SwitchReport {
    assert!(
        new.record.len() >= old.record.len(),
        "new record must be at least as long as the old one"
    );
    let divergence_depth = old.record.iter().zip(&new.record).position(|(a, b)| a != b);
    SwitchReport {
        switched: divergence_depth.is_some(),
        divergence_depth,
    }
}

/// Which qubit each event scatters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventMode {
    /// A fresh qubit in the preparation state per event; record statistics
    /// follow the Born product, switches cannot occur.
    FreshPreparation,
    /// The branch's prior outcome is scattered again; switches occur,
    /// record statistics are an empirical finding.
    RescatterPrior,
}

/// Aggregate of a remembered-history experiment.
#[derive(Clone, Debug)]
pub struct HistoryStatistics {
    pub mode: EventMode,
    pub events: usize,
    pub runs: u64,
    /// Runs that hit a degenerate dominant branch and were excluded.
    pub degenerate_runs: u64,
    /// Final dominant record per completed run, tallied.
    pub record_counts: BTreeMap<Vec<u8>, u64>,
    /// Born product probability of each record, from the preparation state.
    pub expected_probabilities: BTreeMap<Vec<u8>, f64>,
    /// Goodness of fit of the final records against the Born product.
    pub chi_square: ChiSquare,
    /// Per event index (starting at the second event): runs whose dominant
    /// record switched lineage at that event.
    pub switch_counts: Vec<u64>,
    /// Switch counts divided by completed runs.
    pub switch_rates: Vec<f64>,
    /// Histogram over how far back a switch rewrote history:
    /// `switch_lookback_counts[k]` counts switches whose records diverged
    /// `k + 1` events before the switching event (length `n_events - 1`).
    /// Deep rewrites (large lookback) uncover long-hidden branches.
    pub switch_lookback_counts: Vec<u64>,
}

/// Runs `n_runs` independent histories of `n_events` recorded events each,
/// extracts the final dominant records, and compares their distribution
/// against the Born product of the preparation state. Run `r` draws its
/// photons from substream `(seed; r)`.
pub fn run_history_experiment<T: Real>(
    preparation: &QubitState<T>,
    n_events: usize,
    n_runs: u64,
    seed: u64,
    mode: EventMode,
) -> Result<HistoryStatistics, BranchError> {
    if n_events == 0 || n_events > MAX_EVENTS {
        return Err(BranchError::TooManyEvents {
            requested: n_events,
            max: MAX_EVENTS,
        });
    }
    assert!(n_runs >= 1, "at least one run");

    let mut record_counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    let mut switch_counts = vec![0u64; n_events];
    let mut switch_lookback_counts = vec![0u64; n_events.saturating_sub(1)];
    let mut degenerate_runs = 0u64;

    for run in 0..n_runs {
        let mut rng = substream(seed, run);
        let mut tree = BranchTree::<T>::new();
        let mut previous_dominant: Option<Branch<T>> = None;
        let mut degenerate = false;
        for event in 0..n_events {
            let photon = sample_photon::<T, _>(&mut rng);
            tree = match mode {
                EventMode::FreshPreparation => born_event(&tree, preparation, &photon),
                EventMode::RescatterPrior => born_event_rescattered(&tree, preparation, &photon),
            };
            match dominant_history(&tree) {
                Ok(dominant) => {
                    if let Some(old) = &previous_dominant {
                        let report = detect_switch(old, dominant);
                        if report.switched {
                            switch_counts[event] += 1;
                            let depth = report.divergence_depth.expect("switched");
                            // old record has length `event`; lookback 1 is
                            // a rewrite of only the previous event
                            switch_lookback_counts[event - 1 - depth] += 1;
                        }
                    }
                    previous_dominant = Some(dominant.clone());
                }
                Err(_) => {
                    degenerate = true;
                    break;
                }
            }
        }
        if degenerate {
            degenerate_runs += 1;
            continue;
        }
        let record = previous_dominant.expect("n_events >= 1").record;
        *record_counts.entry(record).or_insert(0) += 1;
    }

    let completed = n_runs - degenerate_runs;
    let (p0, p1) = {
        let (p0, p1) = crate::scattering::born_probabilities(preparation);
        (p0.as_f64(), p1.as_f64())
    };
    let mut expected_probabilities = BTreeMap::new();
    for bits in 0..(1u64 << n_events) {
        let record: Vec<u8> = (0..n_events)
            .map(|t| ((bits >> (n_events - 1 - t)) & 1) as u8)
            .collect();
        let p: f64 = record
            .iter()
            .map(|&b| if b == 0 { p0 } else { p1 })
            .product();
        expected_probabilities.insert(record, p);
    }

    // Chi-square over the positive-probability cells; any observation in a
    // zero cell is an immediate gross violation.
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    let mut impossible_seen = false;
    for (record, &p) in &expected_probabilities {
        let count = record_counts.get(record).copied().unwrap_or(0);
        if p > 0.0 {
            observed.push(count);
            expected.push(p * completed as f64);
        } else if count > 0 {
            impossible_seen = true;
        }
    }
    let mut chi_square = if completed > 0 {
        chi_square_gof(&observed, &expected)
    } else {
        // every run hit a degenerate dominant branch; no data to test
        ChiSquare {
            statistic: f64::NAN,
            degrees_of_freedom: 0.0,
            p_value: f64::NAN,
        }
    };
    if impossible_seen {
        chi_square.p_value = 0.0;
    }

    let switch_rates = switch_counts
        .iter()
        .map(|&c| c as f64 / completed.max(1) as f64)
        .collect();

    Ok(HistoryStatistics {
        mode,
        events: n_events,
        runs: n_runs,
        degenerate_runs,
        record_counts,
        expected_probabilities,
        chi_square,
        switch_counts,
        switch_rates,
        switch_lookback_counts,
    })
}

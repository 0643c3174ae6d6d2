//! Truncated occupation-number space with an accessible/inaccessible split.
//!
//! Single-particle modes are partitioned into a sector the local observer
//! can interact with and one it cannot (for a radial grid, the split falls
//! at the observation horizon `r_h = r_l + c T`). States are sparse maps
//! from occupation lists to amplitudes, truncated at a maximum total
//! particle number.
//!
//! The central operation is [`strip`]: amplitudes are grouped by their
//! inaccessible occupation pattern, each group keeps its accessible
//! structure as a rank-one operator (with the inaccessible occupations reset
//! to vacuum), and the groups add incoherently. Orthogonal inaccessible
//! patterns can map to identical local states, but their images must not
//! interfere, which is exactly what the operator-valued sum encodes.
//! [`strip_normalized`] then reduces the stripped operator to the unit
//! vector spanning its dominant eigensubspace: the pure state a local
//! observer would reconstruct.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_complex::Complex;
use thiserror::Error;

use crate::float::Real;
use crate::linalg::CMatrix;
use crate::statespace::{NonNegativeOperator, SpectralError, StateVector};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("mode index {index} out of range for {dim} single-particle modes")]
    InvalidModeIndex { index: usize, dim: usize },
    #[error("accessible and inaccessible sets must partition the mode range")]
    InvalidPartition,
    #[error("occupation list has {actual} entries, space has {expected} modes")]
    ModeCountMismatch { expected: usize, actual: usize },
    #[error("total occupation {total} exceeds the space truncation {max_total}")]
    ExceedsMaxTotal { total: u32, max_total: u32 },
    #[error("states live on different spaces")]
    SpaceMismatch,
}

/// Split of the single-particle modes into accessible and inaccessible
/// index sets. The two sets are disjoint and cover `0..single_particle_dim`
/// by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessibilityPartition {
    single_particle_dim: usize,
    accessible: BTreeSet<usize>,
}

impl AccessibilityPartition {
    pub fn new(
        single_particle_dim: usize,
        accessible: impl IntoIterator<Item = usize>,
    ) -> Result<Self, FockError> {
        let accessible: BTreeSet<usize> = accessible.into_iter().collect();
        if let Some(&index) = accessible.iter().find(|&&i| i >= single_particle_dim) {
            return Err(FockError::InvalidModeIndex {
                index,
                dim: single_particle_dim,
            });
        }
        Ok(Self {
            single_particle_dim,
            accessible,
        })
    }

    /// Builds from both sets, checking they are disjoint and exhaustive.
    pub fn from_sets(
        accessible: impl IntoIterator<Item = usize>,
        inaccessible: impl IntoIterator<Item = usize>,
    ) -> Result<Self, FockError> {
        let accessible: BTreeSet<usize> = accessible.into_iter().collect();
        let inaccessible: BTreeSet<usize> = inaccessible.into_iter().collect();
        let dim = accessible.len() + inaccessible.len();
        if !accessible.is_disjoint(&inaccessible) {
            return Err(FockError::InvalidPartition);
        }
        let covers = accessible.union(&inaccessible).copied().eq(0..dim);
        if !covers {
            return Err(FockError::InvalidPartition);
        }
        Ok(Self {
            single_particle_dim: dim,
            accessible,
        })
    }

    pub fn single_particle_dim(&self) -> usize {
        self.single_particle_dim
    }

    pub fn is_accessible(&self, mode: usize) -> bool {
        self.accessible.contains(&mode)
    }

    /// Accessible mode indices in ascending order.
    pub fn accessible_modes(&self) -> Vec<usize> {
        self.accessible.iter().copied().collect()
    }

    /// Inaccessible mode indices in ascending order.
    pub fn inaccessible_modes(&self) -> Vec<usize> {
        (0..self.single_particle_dim)
            .filter(|m| !self.accessible.contains(m))
            .collect()
    }
}

/// Partition induced by an observation horizon: mode `i` is accessible iff
/// `grid_radii[i] <= r_l + c * t`.
pub fn partition_from_radius<T: Real>(
    grid_radii: &[T],
    r_l: T,
    c: T,
    t: T,
) -> AccessibilityPartition {
    let horizon = r_l + c * t;
    let accessible = grid_radii
        .iter()
        .enumerate()
        .filter(|(_, &r)| r <= horizon)
        .map(|(i, _)| i);
    AccessibilityPartition::new(grid_radii.len(), accessible)
        .expect("indices from enumerate are in range")
}

/// Occupation-number basis label: particle count per single-particle mode,
/// in natural mode order. The all-zeros index is the vacuum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FockIndex {
    occupations: Vec<u32>,
}

impl FockIndex {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self { occupations }
    }

    pub fn vacuum(single_particle_dim: usize) -> Self {
        Self {
            occupations: vec![0; single_particle_dim],
        }
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    pub fn total(&self) -> u32 {
        self.occupations.iter().sum()
    }

    /// Occupations of the accessible modes, ascending mode order.
    pub fn accessible_part(&self, partition: &AccessibilityPartition) -> Vec<u32> {
        partition
            .accessible_modes()
            .iter()
            .map(|&m| self.occupations[m])
            .collect()
    }

    /// Occupations of the inaccessible modes, ascending mode order.
    pub fn inaccessible_part(&self, partition: &AccessibilityPartition) -> Vec<u32> {
        partition
            .inaccessible_modes()
            .iter()
            .map(|&m| self.occupations[m])
            .collect()
    }
}

/// Default total-particle truncation; every claim in this crate is
/// exercised at low occupation numbers.
pub const DEFAULT_MAX_TOTAL: u32 = 3;

/// Shape of a truncated occupation-number space: the mode partition plus
/// the total-particle cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockSpace {
    partition: AccessibilityPartition,
    max_total: u32,
}

impl FockSpace {
    pub fn new(partition: AccessibilityPartition, max_total: u32) -> Self {
        Self {
            partition,
            max_total,
        }
    }

    /// Space with the [`DEFAULT_MAX_TOTAL`] truncation.
    pub fn with_default_truncation(partition: AccessibilityPartition) -> Self {
        Self::new(partition, DEFAULT_MAX_TOTAL)
    }

    pub fn partition(&self) -> &AccessibilityPartition {
        &self.partition
    }

    pub fn single_particle_dim(&self) -> usize {
        self.partition.single_particle_dim()
    }

    pub fn max_total(&self) -> u32 {
        self.max_total
    }

    /// Basis of the accessible sector: occupation lists over the accessible
    /// modes (ascending mode order) with total at most `max_total`, sorted
    /// by total and then lexicographically. This fixed order is the matrix
    /// layout of [`StrippedState`].
    pub fn accessible_sector_basis(&self) -> Vec<Vec<u32>> {
        let modes = self.partition.accessible_modes().len();
        let mut basis = enumerate_occupations(modes, self.max_total);
        basis.sort_by(|a, b| {
            let ta: u32 = a.iter().sum();
            let tb: u32 = b.iter().sum();
            ta.cmp(&tb).then_with(|| a.cmp(b))
        });
        basis
    }
}

fn enumerate_occupations(modes: usize, max_total: u32) -> Vec<Vec<u32>> {
    if modes == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; modes];
    fill(&mut out, &mut current, 0, max_total);
    out
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, mode: usize, budget: u32) {
    if mode == current.len() {
        out.push(current.clone());
        return;
    }
    for count in 0..=budget {
        current[mode] = count;
        fill(out, current, mode + 1, budget - count);
    }
    current[mode] = 0;
}

/// Sparse state on a truncated occupation-number space. Amplitudes with
/// magnitude at or below `1e-15` are pruned.
#[derive(Clone, Debug)]
pub struct FockStateVector<T> {
    space: FockSpace,
    terms: BTreeMap<FockIndex, Complex<T>>,
}

impl<T: Real> FockStateVector<T> {
    pub fn new(space: FockSpace) -> Self {
        Self {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    /// Adds `amplitude` to the coefficient of the given occupation list.
    pub fn add_amplitude(
        &mut self,
        occupations: &[u32],
        amplitude: Complex<T>,
    ) -> Result<(), FockError> {
        if occupations.len() != self.space.single_particle_dim() {
            return Err(FockError::ModeCountMismatch {
                expected: self.space.single_particle_dim(),
                actual: occupations.len(),
            });
        }
        let index = FockIndex::new(occupations.to_vec());
        let total = index.total();
        if total > self.space.max_total() {
            return Err(FockError::ExceedsMaxTotal {
                total,
                max_total: self.space.max_total(),
            });
        }
        let entry = self
            .terms
            .entry(index)
            .or_insert_with(|| Complex::new(T::zero(), T::zero()));
        *entry += amplitude;
        if entry.norm() <= T::from_f64_lossy(tol::AMPLITUDE_PRUNE) {
            let key = FockIndex::new(occupations.to_vec());
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockIndex, &Complex<T>)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn amplitude(&self, occupations: &[u32]) -> Complex<T> {
        self.terms
            .get(&FockIndex::new(occupations.to_vec()))
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn norm_sqr(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Sum of two states on the same space.
    pub fn add(&self, other: &Self) -> Result<Self, FockError> {
        if self.space != other.space {
            return Err(FockError::SpaceMismatch);
        }
        let mut out = self.clone();
        for (index, amp) in &other.terms {
            out.add_amplitude(index.occupations(), *amp)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let mut out = Self::new(self.space.clone());
        for (index, amp) in &self.terms {
            out.terms.insert(index.clone(), amp * factor);
        }
        out
    }
}

/// Result of the stripping map: a non-negative operator on the accessible
/// sector (all inaccessible occupations reset to vacuum), with the basis
/// layout from [`FockSpace::accessible_sector_basis`].
#[derive(Clone, Debug)]
pub struct StrippedState<T> {
    operator: NonNegativeOperator<T>,
    basis: Vec<Vec<u32>>,
}

impl<T: Real> StrippedState<T> {
    pub fn operator(&self) -> &NonNegativeOperator<T> {
        &self.operator
    }

    /// Accessible-sector occupation lists labelling the operator rows.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn trace(&self) -> T {
        self.operator.trace()
    }

    pub fn basis_index(&self, accessible_occupations: &[u32]) -> Option<usize> {
        self.basis
            .iter()
            .position(|b| b.as_slice() == accessible_occupations)
    }

    /// Diagonal weight of one accessible occupation pattern.
    pub fn weight_of(&self, accessible_occupations: &[u32]) -> Option<T> {
        self.basis_index(accessible_occupations)
            .map(|i| self.operator.matrix()[(i, i)].re)
    }
}

/// The stripping map: groups terms by inaccessible occupation pattern,
/// embeds each group's accessible vector as a rank-one operator, and sums
/// the groups incoherently. The trace equals the squared norm of the input.
pub fn strip<T: Real>(psi: &FockStateVector<T>) -> StrippedState<T> {
    let space = psi.space();
    let partition = space.partition();
    let basis = space.accessible_sector_basis();
    let index_of: BTreeMap<&[u32], usize> = basis
        .iter()
        .enumerate()
        .map(|(i, occ)| (occ.as_slice(), i))
        .collect();

    let mut groups: BTreeMap<Vec<u32>, Vec<Complex<T>>> = BTreeMap::new();
    for (index, amplitude) in psi.terms() {
        let accessible = index.accessible_part(partition);
        let inaccessible = index.inaccessible_part(partition);
        let slot = index_of[accessible.as_slice()];
        let group = groups
            .entry(inaccessible)
            .or_insert_with(|| vec![Complex::new(T::zero(), T::zero()); basis.len()]);
        group[slot] += *amplitude;
    }

    let mut matrix = CMatrix::zeros(basis.len());
    for group in groups.values() {
        matrix.accumulate_outer(group);
    }
    StrippedState {
        operator: NonNegativeOperator::from_matrix_unchecked(matrix),
        basis,
    }
}

/// Normalized stripped state: the unit eigenvector of the dominant
/// eigensubspace of `strip(psi)`, with the global phase fixed so the first
/// non-negligible amplitude is real positive.
///
/// Propagates [`SpectralError::DegenerateDominant`] when the dominant
/// subspace is not one-dimensional and [`SpectralError::ZeroOperator`] when
/// `psi` vanishes.
pub fn strip_normalized<T: Real>(
    psi: &FockStateVector<T>,
    tie_tolerance: T,
) -> Result<StateVector<T>, SpectralError> {
    let stripped = strip(psi);
    let (_, vector) = stripped.operator().dominant_eigenvector(tie_tolerance)?;
    let state = StateVector::new(vector).expect("accessible sector has dimension >= 1");
    Ok(state.with_canonical_phase())
}

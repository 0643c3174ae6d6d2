//! State vectors, non-negative operators, and their equivalence structure.
//!
//! Two descriptions of a finite-dimensional system live here: complex
//! amplitude vectors and non-negative Hermitian operators. Operators that
//! differ by a strictly monotonic spectral rescaling (for instance matrix
//! powers) behave identically under unitary evolution, so the physically
//! distinguishable content of an operator is its ordered list of
//! eigensubspaces. The key reduction is [`NonNegativeOperator::dominant_eigenprojection`]:
//! the normalized limit of `op^k / tr(op^k)` as `k` grows, computed directly
//! from the eigendecomposition instead of literal matrix powers (which
//! underflow or overflow long before the limit is resolved numerically).

use num_complex::Complex;
use thiserror::Error;

use crate::float::Real;
use crate::linalg::{inner, norm_sqr, CMatrix};
use crate::tol;

/// Construction errors for vectors and operators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("state vector must have dimension >= 1")]
    EmptyVector,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operator has a non-finite entry")]
    NonFiniteEntry,
    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },
    #[error("cannot normalize a zero vector")]
    ZeroNorm,
}

/// Spectral reduction errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    /// The two largest eigenvalues (or weights) are tied within tolerance.
    /// Such configurations form a measure-zero set; they are surfaced
    /// instead of broken silently so experiments can count them.
    #[error(
        "degenerate dominant eigenvalue: {largest:.6e} vs {second:.6e} (relative tolerance {tolerance:.1e})"
    )]
    DegenerateDominant {
        largest: f64,
        second: f64,
        tolerance: f64,
    },
    /// The operator is zero within tolerance; no dominant subspace exists.
    #[error("zero operator (trace {trace:.3e})")]
    ZeroOperator { trace: f64 },
}

/// Complex amplitude vector on a finite-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self, StateError> {
        if amplitudes.is_empty() {
            return Err(StateError::EmptyVector);
        }
        Ok(Self { amplitudes })
    }

    /// Vector with real amplitudes.
    pub fn from_reals(values: &[T]) -> Result<Self, StateError> {
        Self::new(values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    /// Computational basis vector `index` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self, StateError> {
        if dim == 0 {
            return Err(StateError::EmptyVector);
        }
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amplitudes)
    }

    /// Whether the squared norm is within `1e-12` of one. Nothing in the
    /// crate assumes normalization; this is an explicit check.
    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - T::one()).abs() <= T::from_f64_lossy(tol::NORMALIZED_ABS)
    }

    pub fn normalized(&self) -> Result<Self, StateError> {
        let n = self.norm_sqr();
        if n <= T::from_f64_lossy(tol::ZERO_TRACE) {
            return Err(StateError::ZeroNorm);
        }
        let inv = Complex::new(T::one() / n.sqrt(), T::zero());
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|a| a * inv).collect(),
        })
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>, StateError> {
        if self.dim() != other.dim() {
            return Err(StateError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Multiplies the global phase so the first non-negligible amplitude is
    /// real and positive. Any phase works equally well physically; a fixed
    /// convention keeps results replayable.
    pub fn with_canonical_phase(&self) -> Self {
        let threshold = T::from_f64_lossy(tol::AMPLITUDE_PRUNE);
        for a in &self.amplitudes {
            let mag = a.norm();
            if mag > threshold {
                let factor = a.conj() / Complex::new(mag, T::zero());
                return self.scaled(factor);
            }
        }
        self.clone()
    }
}

/// Tensor product; amplitude at `i * right.dim() + j` is `left[i] * right[j]`.
pub fn tensor<T: Real>(left: &StateVector<T>, right: &StateVector<T>) -> StateVector<T> {
    let mut amplitudes = Vec::with_capacity(left.dim() * right.dim());
    for a in left.amplitudes() {
        for b in right.amplitudes() {
            amplitudes.push(a * b);
        }
    }
    StateVector { amplitudes }
}

/// Rank-one embedding `v -> |v><v|`.
pub fn embed_pure<T: Real>(v: &StateVector<T>) -> NonNegativeOperator<T> {
    let mut m = CMatrix::zeros(v.dim());
    m.accumulate_outer(v.amplitudes());
    NonNegativeOperator::from_matrix_unchecked(m)
}

/// Hermitian positive-semidefinite operator on a finite-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct NonNegativeOperator<T> {
    matrix: CMatrix<T>,
}

impl<T: Real> NonNegativeOperator<T> {
    /// Validating constructor: checks entries are finite, Hermiticity
    /// entrywise (absolute `1e-12`), and positive semidefiniteness
    /// (eigenvalues above `-1e-10`). The trace of a finite matrix exists;
    /// finiteness is what this asserts.
    pub fn new(matrix: CMatrix<T>) -> Result<Self, StateError> {
        if !matrix
            .entries()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(StateError::NonFiniteEntry);
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > T::from_f64_lossy(tol::HERMITIAN_ABS) {
            return Err(StateError::NotHermitian {
                deviation: deviation.as_f64(),
            });
        }
        let eig = matrix.hermitian_eigen();
        if let Some(min) = eig.values.last() {
            if *min < T::from_f64_lossy(tol::PSD_FLOOR) {
                return Err(StateError::NotPositiveSemidefinite {
                    eigenvalue: min.as_f64(),
                });
            }
        }
        Ok(Self { matrix })
    }

    /// For operators that are Hermitian PSD by construction (sums of outer
    /// products, spectral assembly). Skips the eigenvalue check.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix<T>) -> Self {
        debug_assert!(
            matrix.hermitian_deviation() <= T::from_f64_lossy(1e-9),
            "internal operator drifted from Hermitian"
        );
        Self { matrix }
    }

    /// Assembles `sum_k values[k] |vectors[k]><vectors[k]|`.
    pub fn from_spectrum(dim: usize, pairs: &[(T, Vec<Complex<T>>)]) -> Self {
        let mut m = CMatrix::zeros(dim);
        for (value, vector) in pairs {
            let root = value.max(T::zero()).sqrt();
            let scaled: Vec<Complex<T>> = vector
                .iter()
                .map(|z| z * Complex::new(root, T::zero()))
                .collect();
            m.accumulate_outer(&scaled);
        }
        Self::from_matrix_unchecked(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// Eigenvalues in decreasing order, with negatives inside the PSD noise
    /// floor clamped to zero.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.matrix
            .hermitian_eigen()
            .values
            .into_iter()
            .map(|v| v.max(T::zero()))
            .collect()
    }

    /// Unitary conjugation `U self U^dagger`.
    pub fn conjugated(&self, u: &CMatrix<T>) -> Self {
        Self::from_matrix_unchecked(u.mul(&self.matrix).mul(&u.adjoint()))
    }

    /// Weight and projector of the dominant eigensubspace: the limit of
    /// `op^k / tr(op^k)` for large `k`.
    ///
    /// Errors with [`SpectralError::DegenerateDominant`] when the two
    /// largest eigenvalues agree within `tie_tolerance` relative to the
    /// largest, and with [`SpectralError::ZeroOperator`] when the trace is
    /// below `1e-12`.
    pub fn dominant_eigenprojection(
        &self,
        tie_tolerance: T,
    ) -> Result<(T, NonNegativeOperator<T>), SpectralError> {
        let (weight, vector) = self.dominant_eigenvector(tie_tolerance)?;
        let mut m = CMatrix::zeros(self.dim());
        m.accumulate_outer(&vector);
        Ok((weight, Self::from_matrix_unchecked(m)))
    }

    /// Dominant eigenvalue and its (unit) eigenvector, with the same tie and
    /// zero handling as [`Self::dominant_eigenprojection`].
    pub fn dominant_eigenvector(
        &self,
        tie_tolerance: T,
    ) -> Result<(T, Vec<Complex<T>>), SpectralError> {
        let trace = self.trace();
        if trace <= T::from_f64_lossy(tol::ZERO_TRACE) {
            return Err(SpectralError::ZeroOperator {
                trace: trace.as_f64(),
            });
        }
        let eig = self.matrix.hermitian_eigen();
        let largest = eig.values[0].max(T::zero());
        let second = if eig.values.len() > 1 {
            eig.values[1].max(T::zero())
        } else {
            T::zero()
        };
        if largest - second <= tie_tolerance * largest {
            return Err(SpectralError::DegenerateDominant {
                largest: largest.as_f64(),
                second: second.as_f64(),
                tolerance: tie_tolerance.as_f64(),
            });
        }
        Ok((largest, eig.vectors.into_iter().next().expect("dim >= 1")))
    }

    /// Clusters the spectrum into eigensubspaces.
    ///
    /// Adjacent eigenvalues whose gap is at most `cluster_tolerance`
    /// relative to the larger of the pair share a cluster; the nullspace
    /// cluster (eigenvalues at or below `1e-12`) is omitted.
    pub fn eigen_signature(&self, cluster_tolerance: T) -> EigenSignature<T> {
        let eig = self.matrix.hermitian_eigen();
        let nullspace = T::from_f64_lossy(tol::NULLSPACE_ABS);
        let mut clusters: Vec<EigenCluster<T>> = Vec::new();
        let mut current: Vec<usize> = Vec::new();

        let flush = |indices: &[usize], clusters: &mut Vec<EigenCluster<T>>| {
            if indices.is_empty() {
                return;
            }
            let mut projector = CMatrix::zeros(self.dim());
            let mut value_sum = T::zero();
            for &i in indices {
                projector.accumulate_outer(&eig.vectors[i]);
                value_sum += eig.values[i].max(T::zero());
            }
            clusters.push(EigenCluster {
                dimension: indices.len(),
                eigenvalue: value_sum / T::from_f64_lossy(indices.len() as f64),
                projector,
            });
        };

        for i in 0..eig.values.len() {
            let value = eig.values[i].max(T::zero());
            if value <= nullspace {
                break; // sorted decreasingly; the rest is nullspace
            }
            if let Some(&prev) = current.last() {
                let gap = eig.values[prev] - eig.values[i];
                if gap <= cluster_tolerance * eig.values[prev].max(nullspace) {
                    current.push(i);
                    continue;
                }
                flush(&current, &mut clusters);
                current.clear();
            }
            current.push(i);
        }
        flush(&current, &mut clusters);
        EigenSignature { clusters }
    }
}

/// One eigenvalue cluster of an operator: its multiplicity, a
/// representative eigenvalue (diagnostic only), and the projector onto the
/// clustered subspace.
#[derive(Clone, Debug)]
pub struct EigenCluster<T> {
    pub dimension: usize,
    pub eigenvalue: T,
    pub projector: CMatrix<T>,
}

/// Ordered list of eigensubspaces in decreasing eigenvalue order, nullspace
/// omitted. This is the representative of the dynamical equivalence class
/// of an operator: two operators with the same signature evolve
/// indistinguishably.
#[derive(Clone, Debug)]
pub struct EigenSignature<T> {
    clusters: Vec<EigenCluster<T>>,
}

impl<T: Real> EigenSignature<T> {
    pub fn clusters(&self) -> &[EigenCluster<T>] {
        &self.clusters
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.dimension).collect()
    }

    /// Signature equality: dimension lists match and the subspace
    /// projectors agree pairwise within `projector_tolerance` (Frobenius).
    /// Eigenvalues never participate.
    pub fn approx_eq(&self, other: &Self, projector_tolerance: T) -> bool {
        if self.dimensions() != other.dimensions() {
            return false;
        }
        self.clusters
            .iter()
            .zip(&other.clusters)
            .all(|(a, b)| a.projector.sub(&b.projector).frobenius_norm() <= projector_tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_unitary;
    use crate::rng::master;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn tie() -> f64 {
        tol::TIE_RELATIVE
    }

    #[test]
    fn embed_pure_basis_vector() {
        let v = StateVector::from_reals(&[1.0, 0.0]).unwrap();
        let op = embed_pure(&v);
        assert_eq!(op.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(op.matrix()[(1, 1)], c(0.0, 0.0));
        assert!((op.trace() - v.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn embed_pure_uniform_superposition() {
        let s = 0.5f64.sqrt();
        let v = StateVector::from_reals(&[s, s]).unwrap();
        let op = embed_pure(&v);
        for i in 0..2 {
            for j in 0..2 {
                assert!((op.matrix()[(i, j)] - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn embed_pure_complex_amplitudes() {
        // (sqrt 0.7, i sqrt 0.3): off-diagonal is -i sqrt(0.21) / +i sqrt(0.21).
        let v = StateVector::new(vec![c(0.7f64.sqrt(), 0.0), c(0.0, 0.3f64.sqrt())]).unwrap();
        let op = embed_pure(&v);
        let s21 = 0.21f64.sqrt();
        assert!((op.matrix()[(0, 0)] - c(0.7, 0.0)).norm() < 1e-15);
        assert!((op.matrix()[(0, 1)] - c(0.0, -s21)).norm() < 1e-15);
        assert!((op.matrix()[(1, 0)] - c(0.0, s21)).norm() < 1e-15);
        assert!((op.matrix()[(1, 1)] - c(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn embed_pure_is_rank_one() {
        let mut rng = master(3);
        let u = haar_unitary::<f64, _>(5, &mut rng);
        let v = StateVector::new((0..5).map(|i| u[(i, 0)]).collect()).unwrap();
        let eigs = embed_pure(&v).eigenvalues();
        assert!(eigs[1] <= 1e-10);
    }

    #[test]
    fn tensor_basis_and_scalar() {
        let e0 = StateVector::from_reals(&[1.0, 0.0]).unwrap();
        let e1 = StateVector::from_reals(&[0.0, 1.0]).unwrap();
        let t = tensor(&e0, &e1);
        assert_eq!(
            t.amplitudes(),
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );

        let ab = StateVector::new(vec![c(0.3, 0.1), c(-0.2, 0.9)]).unwrap();
        let one = StateVector::from_reals(&[1.0]).unwrap();
        assert_eq!(tensor(&ab, &one).amplitudes(), ab.amplitudes());
    }

    #[test]
    fn tensor_hadamard_pair() {
        let s = 0.5f64.sqrt();
        let plus = StateVector::from_reals(&[s, s]).unwrap();
        let minus = StateVector::from_reals(&[s, -s]).unwrap();
        let t = tensor(&plus, &minus);
        let expect = [0.5, -0.5, 0.5, -0.5];
        for (a, e) in t.amplitudes().iter().zip(expect) {
            assert!((a - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_norms_multiply_and_associate() {
        let mut rng = master(9);
        for _ in 0..20 {
            let rand_vec = |rng: &mut crate::rng::Stream, d: usize| {
                StateVector::new(
                    (0..d)
                        .map(|_| {
                            let (re, im) = crate::rng::standard_normal_pair::<f64, _>(rng);
                            c(re, im)
                        })
                        .collect(),
                )
                .unwrap()
            };
            let a = rand_vec(&mut rng, 2);
            let b = rand_vec(&mut rng, 3);
            let d = rand_vec(&mut rng, 2);
            let ab = tensor(&a, &b);
            assert!((ab.norm_sqr() - a.norm_sqr() * b.norm_sqr()).abs() < 1e-12);
            let left = tensor(&ab, &d);
            let right = tensor(&a, &tensor(&b, &d));
            for (x, y) in left.amplitudes().iter().zip(right.amplitudes()) {
                assert!((x - y).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn dominant_projection_diagonal() {
        let op = NonNegativeOperator::new(CMatrix::from_diagonal(&[0.7, 0.3])).unwrap();
        let (weight, projector) = op.dominant_eigenprojection(tie()).unwrap();
        assert!((weight - 0.7).abs() < 1e-14);
        assert!((projector.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(projector.matrix()[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn dominant_projection_rejects_exact_tie() {
        let op = NonNegativeOperator::new(CMatrix::from_diagonal(&[0.5, 0.5])).unwrap();
        match op.dominant_eigenprojection(tie()) {
            Err(SpectralError::DegenerateDominant { .. }) => {}
            other => panic!("expected degenerate dominant, got {other:?}"),
        }
    }

    #[test]
    fn dominant_projection_rejects_zero_operator() {
        let op = NonNegativeOperator::new(CMatrix::zeros(2)).unwrap();
        match op.dominant_eigenprojection(tie()) {
            Err(SpectralError::ZeroOperator { .. }) => {}
            other => panic!("expected zero operator, got {other:?}"),
        }
    }

    #[test]
    fn projector_is_idempotent() {
        let mut rng = master(17);
        let u = haar_unitary::<f64, _>(4, &mut rng);
        let op = NonNegativeOperator::new(CMatrix::from_diagonal(&[0.5, 0.3, 0.15, 0.05]))
            .unwrap()
            .conjugated(&u);
        let (_, p) = op.dominant_eigenprojection(tie()).unwrap();
        let p2 = p.matrix().mul(p.matrix());
        assert!(p2.sub(p.matrix()).frobenius_norm() < 1e-10);
    }

    #[test]
    fn evolution_equivariance_of_dominant_projector() {
        let mut rng = master(23);
        for _ in 0..10 {
            let u = haar_unitary::<f64, _>(4, &mut rng);
            let base = NonNegativeOperator::new(CMatrix::from_diagonal(&[0.45, 0.30, 0.20, 0.05]))
                .unwrap();
            let w = haar_unitary::<f64, _>(4, &mut rng);
            let op = base.conjugated(&w);
            let (_, p) = op.dominant_eigenprojection(tie()).unwrap();
            let (_, p_evolved) = op.conjugated(&u).dominant_eigenprojection(tie()).unwrap();
            let expected = u.mul(p.matrix()).mul(&u.adjoint());
            assert!(p_evolved.matrix().sub(&expected).frobenius_norm() < 1e-8);
        }
    }

    #[test]
    fn signature_of_degenerate_diagonal() {
        let op = NonNegativeOperator::new(CMatrix::from_diagonal(&[0.5, 0.5, 0.0])).unwrap();
        let sig = op.eigen_signature(tol::CLUSTER_RELATIVE);
        assert_eq!(sig.dimensions(), vec![2]);
    }

    #[test]
    fn signature_of_distinct_diagonal() {
        let op = NonNegativeOperator::new(CMatrix::from_diagonal(&[0.6, 0.3, 0.1])).unwrap();
        let sig = op.eigen_signature(tol::CLUSTER_RELATIVE);
        assert_eq!(sig.dimensions(), vec![1, 1, 1]);
    }

    #[test]
    fn signature_commutes_with_conjugation() {
        let mut rng = master(31);
        let op = NonNegativeOperator::new(CMatrix::from_diagonal(&[0.6, 0.3, 0.1])).unwrap();
        let u = haar_unitary::<f64, _>(3, &mut rng);
        let conj = op.conjugated(&u);
        let sig = op.eigen_signature(tol::CLUSTER_RELATIVE);
        let sig_conj = conj.eigen_signature(tol::CLUSTER_RELATIVE);
        assert_eq!(sig.dimensions(), sig_conj.dimensions());
        for (a, b) in sig.clusters().iter().zip(sig_conj.clusters()) {
            let mapped = u.mul(&a.projector).mul(&u.adjoint());
            assert!(mapped.sub(&b.projector).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn signature_invariant_under_powers() {
        let mut rng = master(37);
        let u = haar_unitary::<f64, _>(4, &mut rng);
        let op = NonNegativeOperator::new(CMatrix::from_diagonal(&[0.5, 0.25, 0.15, 0.10]))
            .unwrap()
            .conjugated(&u);
        let sig = op.eigen_signature(tol::CLUSTER_RELATIVE);
        let mut power = op.matrix().clone();
        for k in 2..=4 {
            power = power.mul(op.matrix());
            let sig_k = NonNegativeOperator::from_matrix_unchecked(power.clone())
                .eigen_signature(tol::CLUSTER_RELATIVE);
            assert!(
                sig.approx_eq(&sig_k, 1e-8),
                "signature changed under power {k}"
            );
        }
    }

    #[test]
    fn canonical_phase_makes_first_amplitude_positive() {
        let v = StateVector::new(vec![c(0.0, 0.8), c(0.6, 0.0)]).unwrap();
        let fixed = v.with_canonical_phase();
        assert!(fixed.amplitudes()[0].im.abs() < 1e-15);
        assert!(fixed.amplitudes()[0].re > 0.0);
        assert!((fixed.norm_sqr() - v.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_operators() {
        let m = CMatrix::from_vec(2, vec![c(1.0, 0.0), c(0.5, 0.0), c(0.1, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            NonNegativeOperator::new(m),
            Err(StateError::NotHermitian { .. })
        ));
        let neg = CMatrix::from_diagonal(&[1.0, -0.2]);
        assert!(matches!(
            NonNegativeOperator::new(neg),
            Err(StateError::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn generic_core_compiles_for_f32() {
        let v: StateVector<f32> = StateVector::from_reals(&[0.6, 0.8]).unwrap();
        let op = embed_pure(&v);
        assert!((op.trace() - 1.0).abs() < 1e-6);
    }
}

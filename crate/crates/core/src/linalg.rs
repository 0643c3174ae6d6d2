//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything in the simulator lives on spaces of at most a few hundred
//! dimensions, so a plain row-major dense matrix with a cyclic Jacobi
//! eigensolver covers all needs without pulling in a linear-algebra stack.

use num_complex::Complex;
use rand::Rng;

use crate::float::Real;
use crate::rng::standard_normal_pair;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::new(T::zero(), T::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds from a row-major entry list; `data.len()` must be `n * n`.
    pub fn from_vec(n: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data must have n*n entries");
        Self { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        (0..self.n)
            .map(|i| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..self.n {
                    acc += self[(i, j)] * v[j];
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Self { n: self.n, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Self { n: self.n, data }
    }

    pub fn scale(&self, factor: T) -> Self {
        let f = Complex::new(factor, T::zero());
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a * f).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.n {
            acc += self[(i, i)];
        }
        acc
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest entrywise absolute difference to `rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest deviation of `A[i][j]` from `conj(A[j][i])`.
    pub fn hermitian_deviation(&self) -> T {
        let mut dev = T::zero();
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Frobenius norm of the commutator `AB - BA`.
    pub fn commutator_norm(&self, rhs: &Self) -> T {
        self.mul(rhs).sub(&rhs.mul(self)).frobenius_norm()
    }

    /// Accumulates the outer product: `self += v v^dagger`.
    pub fn accumulate_outer(&mut self, v: &[Complex<T>]) {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        for i in 0..self.n {
            if v[i].norm_sqr() == T::zero() {
                continue;
            }
            for j in 0..self.n {
                let add = v[i] * v[j].conj();
                self[(i, j)] += add;
            }
        }
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in decreasing order with matching orthonormal
    /// eigenvectors. The caller is responsible for `self` actually being
    /// Hermitian; only the upper triangle drives the rotations.
    pub fn hermitian_eigen(&self) -> HermitianEigen<T> {
        let n = self.n;
        if n == 0 {
            return HermitianEigen {
                values: vec![],
                vectors: vec![],
            };
        }
        let mut a = self.clone();
        let mut v = Self::identity(n);
        let scale = a.frobenius_norm().max(T::min_positive_value());
        let target = T::epsilon() * scale * T::from_f64_lossy(n as f64);
        let skip = T::epsilon() * scale;

        for _sweep in 0..200 {
            if a.off_diagonal_norm() <= target {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let m = a[(p, q)];
                    let mag = m.norm();
                    if mag <= skip {
                        continue;
                    }
                    let phase = m / Complex::new(mag, T::zero());
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let zeta = (aqq - app) / (mag + mag);
                    // Smaller root of |m| t^2 - (aqq - app) t - |m| = 0.
                    let t = if zeta >= T::zero() {
                        -T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
                    } else {
                        T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    a.rotate_right(p, q, c, s, phase);
                    a.rotate_left(p, q, c, s, phase);
                    v.rotate_right(p, q, c, s, phase);
                    // Keep the Hermitian structure exact against drift.
                    a[(p, q)] = a[(q, p)].conj();
                    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let values: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| {
            values[j]
                .partial_cmp(&values[i])
                .expect("finite eigenvalues")
        });
        HermitianEigen {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: order
                .iter()
                .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
                .collect(),
        }
    }

    fn off_diagonal_norm(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    acc += self[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// Right-multiplies by the plane rotation G(p, q; c, s, phase) where
    /// G[p][p] = c, G[p][q] = -s*phase, G[q][p] = s*conj(phase), G[q][q] = c.
    fn rotate_right(&mut self, p: usize, q: usize, c: T, s: T, phase: Complex<T>) {
        let cc = Complex::new(c, T::zero());
        let sp = Complex::new(s, T::zero()) * phase;
        let spc = Complex::new(s, T::zero()) * phase.conj();
        for k in 0..self.n {
            let old_p = self[(k, p)];
            let old_q = self[(k, q)];
            self[(k, p)] = cc * old_p + spc * old_q;
            self[(k, q)] = cc * old_q - sp * old_p;
        }
    }

    /// Left-multiplies by the adjoint of the same plane rotation.
    fn rotate_left(&mut self, p: usize, q: usize, c: T, s: T, phase: Complex<T>) {
        let cc = Complex::new(c, T::zero());
        let sp = Complex::new(s, T::zero()) * phase;
        let spc = Complex::new(s, T::zero()) * phase.conj();
        for k in 0..self.n {
            let old_p = self[(p, k)];
            let old_q = self[(q, k)];
            self[(p, k)] = cc * old_p + sp * old_q;
            self[(q, k)] = cc * old_q - spc * old_p;
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Result of [`CMatrix::hermitian_eigen`]: eigenvalues in decreasing order,
/// `vectors[k]` the eigenvector of `values[k]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<Complex<T>>>,
}

/// Squared norm of a complex vector.
pub fn norm_sqr<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// Inner product `<a|b>`, conjugate-linear in the first argument.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        })
}

/// Haar-distributed random unitary, built by Gram-Schmidt on a complex
/// Gaussian matrix.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex<T>> = (0..n)
            .map(|_| {
                let (re, im) = standard_normal_pair(rng);
                Complex::new(re, im)
            })
            .collect();
        // Two orthogonalization passes keep the basis orthonormal to
        // working precision.
        for _ in 0..2 {
            for u in &cols {
                let overlap = inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= overlap * ui;
                }
            }
        }
        let norm = norm_sqr(&v).sqrt();
        if norm < T::from_f64_lossy(1e-6) {
            continue; // linearly dependent draw; retry
        }
        let inv = Complex::new(T::one() / norm, T::zero());
        for vi in v.iter_mut() {
            *vi *= inv;
        }
        cols.push(v);
    }
    CMatrix::from_fn(n, |i, j| cols[j][i])
}

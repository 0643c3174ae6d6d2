//! Brute-force oracles and fixture generators shared by the integration
//! suites. The oracles deliberately avoid the library's matrix type and
//! reduction routines: they work on plain nested vectors so that agreement
//! with the library is a genuine cross-check.

use num_complex::Complex;
use rand::Rng;

use bornsim_core::fock::FockStateVector;
use bornsim_core::linalg::{haar_unitary, CMatrix};
use bornsim_core::rng::standard_normal_pair;
use bornsim_core::statespace::NonNegativeOperator;

pub type C64 = Complex<f64>;
pub type PlainMatrix = Vec<Vec<C64>>;

pub fn plain_zeros(n: usize) -> PlainMatrix {
    vec![vec![C64::new(0.0, 0.0); n]; n]
}

pub fn plain_mul(a: &PlainMatrix, b: &PlainMatrix) -> PlainMatrix {
    let n = a.len();
    let mut out = plain_zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn plain_trace(a: &PlainMatrix) -> C64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

fn plain_scale(a: &mut PlainMatrix, factor: f64) {
    for row in a.iter_mut() {
        for entry in row.iter_mut() {
            *entry *= factor;
        }
    }
}

/// Trace-normalized `m^k` by binary exponentiation, renormalizing after
/// every multiply so that huge `k` neither overflows nor underflows.
pub fn normalized_power_oracle(m: &PlainMatrix, k: u64) -> PlainMatrix {
    assert!(k >= 1);
    let normalize = |a: &mut PlainMatrix| {
        let t = plain_trace(a).re;
        assert!(t > 0.0, "power oracle needs positive trace");
        plain_scale(a, 1.0 / t);
    };
    let mut base = m.clone();
    normalize(&mut base);
    let mut result: Option<PlainMatrix> = None;
    let mut exp = k;
    while exp > 0 {
        if exp & 1 == 1 {
            let mut next = match &result {
                Some(r) => plain_mul(r, &base),
                None => base.clone(),
            };
            normalize(&mut next);
            result = Some(next);
        }
        exp >>= 1;
        if exp > 0 {
            let mut sq = plain_mul(&base, &base);
            normalize(&mut sq);
            base = sq;
        }
    }
    let mut out = result.expect("k >= 1");
    normalize(&mut out);
    out
}

/// Dense partial trace over the inaccessible sector of `|psi><psi|`.
///
/// The state is embedded on the full tensor product of the accessible and
/// inaccessible occupation bases (entries outside the truncation are zero),
/// the rank-one density matrix is formed, and the inaccessible factor is
/// traced out index by index. Row order matches
/// `accessible_sector_basis()` so results are directly comparable with the
/// library's stripped operator.
pub fn partial_trace_oracle(psi: &FockStateVector<f64>) -> PlainMatrix {
    let space = psi.space();
    let partition = space.partition();
    let accessible_basis = space.accessible_sector_basis();
    let inaccessible_modes = partition.inaccessible_modes();
    let inaccessible_basis = enumerate_occupations(inaccessible_modes.len(), space.max_total());

    let a_dim = accessible_basis.len();
    let i_dim = inaccessible_basis.len();
    let mut full = vec![C64::new(0.0, 0.0); a_dim * i_dim];
    for (index, amplitude) in psi.terms() {
        let na = index.accessible_part(partition);
        let ni = index.inaccessible_part(partition);
        let a = accessible_basis
            .iter()
            .position(|b| *b == na)
            .expect("accessible part within truncation");
        let i = inaccessible_basis
            .iter()
            .position(|b| *b == ni)
            .expect("inaccessible part within truncation");
        full[a * i_dim + i] += amplitude;
    }

    let mut reduced = plain_zeros(a_dim);
    for a1 in 0..a_dim {
        for a2 in 0..a_dim {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..i_dim {
                acc += full[a1 * i_dim + i] * full[a2 * i_dim + i].conj();
            }
            reduced[a1][a2] = acc;
        }
    }
    reduced
}

fn enumerate_occupations(modes: usize, max_total: u32) -> Vec<Vec<u32>> {
    if modes == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; modes];
    fn rec(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, mode: usize, budget: u32) {
        if mode == current.len() {
            out.push(current.clone());
            return;
        }
        for count in 0..=budget {
            current[mode] = count;
            rec(out, current, mode + 1, budget - count);
        }
        current[mode] = 0;
    }
    rec(&mut out, &mut current, 0, max_total);
    out
}

/// Largest entrywise difference between a plain matrix and a library one.
pub fn max_abs_diff_plain(a: &PlainMatrix, b: &CMatrix<f64>) -> f64 {
    let n = a.len();
    assert_eq!(n, b.dim());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[i][j] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn frobenius_diff_plain(a: &PlainMatrix, b: &CMatrix<f64>) -> f64 {
    let n = a.len();
    assert_eq!(n, b.dim());
    let mut acc = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            acc += (a[i][j] - b[(i, j)]).norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn cmatrix_to_plain(m: &CMatrix<f64>) -> PlainMatrix {
    let n = m.dim();
    (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Random positive operator with eigenvalues `1 > gap >= ...`, conjugated
/// by a Haar unitary, so the dominant eigensubspace is well separated.
pub fn random_gapped_operator<R: Rng>(
    dim: usize,
    max_secondary: f64,
    rng: &mut R,
) -> NonNegativeOperator<f64> {
    let mut diag = vec![1.0f64];
    for _ in 1..dim {
        diag.push(rng.random::<f64>() * max_secondary);
    }
    let u = haar_unitary::<f64, _>(dim, rng);
    NonNegativeOperator::new(CMatrix::from_diagonal(&diag))
        .expect("diagonal PSD")
        .conjugated(&u)
}

/// Random sparse state on a random space with the given bounds.
pub fn random_fock_state<R: Rng>(
    max_dim: usize,
    max_total: u32,
    rng: &mut R,
) -> FockStateVector<f64> {
    use bornsim_core::fock::{AccessibilityPartition, FockSpace};
    let dim = 2 + (rng.random::<u32>() as usize) % (max_dim - 1);
    let accessible: Vec<usize> = (0..dim).filter(|_| rng.random::<bool>()).collect();
    let space = FockSpace::new(
        AccessibilityPartition::new(dim, accessible).expect("indices in range"),
        max_total,
    );
    let mut psi = FockStateVector::new(space);
    for occ in enumerate_occupations(dim, max_total) {
        if rng.random::<f64>() < 0.4 {
            let (re, im) = standard_normal_pair(rng);
            psi.add_amplitude(&occ, C64::new(re, im))
                .expect("occupation within bounds");
        }
    }
    psi
}

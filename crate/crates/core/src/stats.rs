//! Statistical test helpers for the Monte Carlo harnesses.
//!
//! All reporting runs in `f64`; the chi-square tail probability comes from
//! `statrs`. Goodness-of-fit verdicts in this crate use p-value floors
//! (typically `p > 0.001`) or four-sigma binomial bands.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Result of a chi-square test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
}

/// Goodness of fit of observed counts against expected counts.
/// `expected` entries must be positive; degrees of freedom is
/// `cells - 1`.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), expected.len(), "cell count mismatch");
    assert!(!observed.is_empty(), "need at least one cell");
    assert!(
        expected.iter().all(|&e| e > 0.0),
        "expected counts must be positive"
    );
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let dof = (observed.len() - 1) as f64;
    ChiSquare {
        statistic,
        degrees_of_freedom: dof,
        p_value: chi_square_p(statistic, dof),
    }
}

/// Two-sample chi-square homogeneity test on count vectors of equal length.
/// Cells where both samples are empty are skipped.
pub fn chi_square_two_sample(first: &[u64], second: &[u64]) -> ChiSquare {
    assert_eq!(first.len(), second.len(), "cell count mismatch");
    let n1: f64 = first.iter().sum::<u64>() as f64;
    let n2: f64 = second.iter().sum::<u64>() as f64;
    assert!(n1 > 0.0 && n2 > 0.0, "both samples must be non-empty");
    let k1 = (n2 / n1).sqrt();
    let k2 = (n1 / n2).sqrt();
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&a, &b) in first.iter().zip(second) {
        let total = a + b;
        if total == 0 {
            continue;
        }
        let d = k1 * a as f64 - k2 * b as f64;
        statistic += d * d / total as f64;
        cells += 1;
    }
    let dof = (cells.max(2) - 1) as f64;
    ChiSquare {
        statistic,
        degrees_of_freedom: dof,
        p_value: chi_square_p(statistic, dof),
    }
}

fn chi_square_p(statistic: f64, dof: f64) -> f64 {
    if dof <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof).expect("positive degrees of freedom");
    (1.0 - dist.cdf(statistic)).clamp(0.0, 1.0)
}

/// Kolmogorov-Smirnov statistic of samples against a reference CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty(), "need samples");
    samples.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let upper = (i as f64 + 1.0) / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper.abs()).max(lower.abs());
    }
    d
}

/// Asymptotic Kolmogorov-Smirnov critical value at significance `alpha`:
/// `sqrt(-ln(alpha / 2) / 2) / sqrt(n)`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    assert!(n > 0 && alpha > 0.0 && alpha < 1.0);
    ((-(alpha / 2.0).ln()) / 2.0).sqrt() / (n as f64).sqrt()
}

/// Binomial standard error of a frequency estimate.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n.max(1) as f64).sqrt()
}

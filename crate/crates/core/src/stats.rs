//! Goodness-of-fit helpers used by the Monte Carlo checks.

use serde::Serialize;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

impl TestResult {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Kolmogorov distribution tail `P(K > x)`.
fn kolmogorov_tail(x: f64) -> f64 {
    // The series converges slowly near zero, where the tail is 1 anyway.
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov test of `sample` against `cdf`.
///
/// The p-value uses the asymptotic Kolmogorov law with Stephens'
/// small-sample correction `(sqrt(n) + 0.12 + 0.11 / sqrt(n)) D`.
pub fn ks_test<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> TestResult {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let en = n.sqrt();
    TestResult {
        statistic: d,
        p_value: kolmogorov_tail((en + 0.12 + 0.11 / en) * d),
    }
}

/// KS test against `Beta(a, b)`.
pub fn ks_test_beta(sample: &[f64], a: f64, b: f64) -> TestResult {
    let dist = Beta::new(a, b).expect("beta parameters are positive");
    ks_test(sample, |x| dist.cdf(x))
}

/// Pearson chi-square test of observed counts against expected
/// probabilities. Cells with zero expected probability must be empty.
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> TestResult {
    assert_eq!(observed.len(), expected.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        if p <= 0.0 {
            if o > 0 {
                return TestResult {
                    statistic: f64::INFINITY,
                    p_value: 0.0,
                };
            }
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let dof = cells.saturating_sub(1).max(1) as f64;
    let dist = ChiSquared::new(dof).expect("positive degrees of freedom");
    TestResult {
        statistic: stat,
        p_value: 1.0 - dist.cdf(stat),
    }
}

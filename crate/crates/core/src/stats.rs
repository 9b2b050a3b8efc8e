//! Goodness-of-fit tests and small regression helpers.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.3 {
        // The alternating series converges slowly here; the value is 1 to
        // double precision.
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

fn sorted<S: Real>(xs: &[S]) -> Vec<f64> {
    let mut v: Vec<f64> = xs.iter().map(|x| x.to_f64().unwrap()).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value.
pub fn ks_two_sample<S: Real>(a: &[S], b: &[S]) -> TestResult {
    let (a, b) = (sorted(a), sorted(b));
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = (n as f64 * m as f64 / (n + m) as f64).sqrt();
    let p = kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
    TestResult { statistic: d, p_value: p }
}

/// One-sample Kolmogorov–Smirnov test against a continuous `cdf`.
pub fn ks_one_sample<S: Real>(xs: &[S], cdf: impl Fn(f64) -> f64) -> TestResult {
    let v = sorted(xs);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let en = n.sqrt();
    TestResult { statistic: d, p_value: kolmogorov_survival((en + 0.12 + 0.11 / en) * d) }
}

/// Pearson χ² test of `observed` counts against `expected` probabilities.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> TestResult {
    assert_eq!(observed.len(), expected.len());
    let total: u64 = observed.iter().sum();
    let norm: f64 = expected.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p / norm * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = (observed.len() - 1).max(1) as f64;
    let p = 1.0 - ChiSquared::new(dof).expect("positive dof").cdf(stat);
    TestResult { statistic: stat, p_value: p }
}

/// χ² test of uniformity over the categories.
pub fn chi_square_uniform(observed: &[u64]) -> TestResult {
    chi_square(observed, &vec![1.0; observed.len()])
}

/// Whether every test passes at family-wise level `alpha` (Bonferroni).
pub fn bonferroni_pass(p_values: &[f64], alpha: f64) -> bool {
    let k = p_values.len().max(1) as f64;
    p_values.iter().all(|&p| p > alpha / k)
}

pub fn mean<S: Real>(xs: &[S]) -> S {
    let n = S::from_usize(xs.len()).unwrap();
    xs.iter().fold(S::zero(), |a, &b| a + b) / n
}

/// Unbiased sample variance.
pub fn variance<S: Real>(xs: &[S]) -> S {
    let m = mean(xs);
    let n = S::from_usize(xs.len().max(2) - 1).unwrap();
    xs.iter().fold(S::zero(), |a, &b| a + (b - m) * (b - m)) / n
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    LineFit { slope, intercept: my - slope * mx }
}

/// Percentile interval of `stat` over `resamples` bootstrap draws of the
/// groups, each group resampled with replacement independently.
pub fn bootstrap_interval<R: Rng + ?Sized>(
    groups: &[Vec<f64>],
    stat: impl Fn(&[Vec<f64>]) -> f64,
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> (f64, f64) {
    let mut values: Vec<f64> = (0..resamples)
        .map(|_| {
            let boot: Vec<Vec<f64>> = groups
                .iter()
                .map(|g| (0..g.len()).map(|_| g[rng.random_range(0..g.len())]).collect())
                .collect();
            stat(&boot)
        })
        .collect();
    values.sort_by(|a, b| a.total_cmp(b));
    let lo = ((1.0 - level) / 2.0 * resamples as f64).floor() as usize;
    let hi = (((1.0 + level) / 2.0 * resamples as f64).ceil() as usize).min(resamples) - 1;
    (values[lo.min(resamples - 1)], values[hi])
}

/// Empirical quantile by linear interpolation between order statistics.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(v.len() - 1);
    v[i] + (v[j] - v[i]) * (pos - i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn kolmogorov_tail_values() {
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn identical_samples_pass() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn shifted_samples_fail() {
        let a: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.3).collect();
        assert!(ks_two_sample(&a, &b).p_value < 1e-6);
    }

    #[test]
    fn uniform_one_sample() {
        let mut rng = crate::Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..2000).map(|_| rng.random()).collect();
        assert!(ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).p_value > 0.001);
    }

    #[test]
    fn chi_square_on_exact_counts() {
        let r = chi_square_uniform(&[100, 100, 100]);
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert!(chi_square_uniform(&[300, 0, 0]).p_value < 1e-10);
    }

    #[test]
    fn line_fit() {
        let x = [1.0, 2.0, 3.0];
        let y = [3.0, 5.0, 7.0];
        let f = least_squares(&x, &y);
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bonferroni() {
        assert!(bonferroni_pass(&[0.03, 0.5], 0.05));
        assert!(!bonferroni_pass(&[0.02, 0.5], 0.05));
    }
}

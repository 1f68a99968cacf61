use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// `Phi(x / sqrt(variance))`.
pub fn normal_cdf(x: f64, variance: f64) -> f64 {
    Normal::new(0.0, variance.sqrt())
        .expect("positive variance")
        .cdf(x)
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical law of
/// `samples` and `N(0, variance)`.
pub fn ks_statistic(samples: &[f64], variance: f64) -> Result<f64> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::NonPositiveVariance(variance));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let dist = Normal::new(0.0, variance.sqrt()).expect("positive variance");
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = dist.cdf(*x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// KS distance to the point mass at zero (the `t = 0` marginal).
pub fn ks_statistic_degenerate(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = samples.len() as f64;
    let below = samples.iter().filter(|x| **x < 0.0).count() as f64;
    let above = samples.iter().filter(|x| **x > 0.0).count() as f64;
    Ok((below / n).max(above / n))
}

/// Asymptotic p-value proxy for a KS distance `d` over `n` samples:
/// the Kolmogorov tail at `(sqrt n + 0.12 + 0.11 / sqrt n) d`.
pub fn ks_p_proxy(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Column `j` of a row-major `R x k` sample matrix.
pub fn column(paths: &[Vec<f64>], j: usize) -> Vec<f64> {
    paths.iter().map(|p| p[j]).collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample covariance of two equally long columns.
pub fn covariance(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (x.len() - 1) as f64
}

/// Pearson correlation; 0 when either column is constant.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let vx = covariance(x, x);
    let vy = covariance(y, y);
    if vx <= 0.0 || vy <= 0.0 {
        return 0.0;
    }
    covariance(x, y) / (vx * vy).sqrt()
}

/// `k x k` unbiased covariance matrix of the path values.
pub fn covariance_matrix(paths: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = paths.first().map_or(0, Vec::len);
    let cols: Vec<Vec<f64>> = (0..k).map(|j| column(paths, j)).collect();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let c = covariance(&cols[i], &cols[j]);
            out[i][j] = c;
            out[j][i] = c;
        }
    }
    out
}

/// Non-overlapping increments `x(t_1) - 0, x(t_2) - x(t_1), ...`.
pub fn increments(paths: &[Vec<f64>]) -> Vec<Vec<f64>> {
    paths
        .iter()
        .map(|p| {
            let mut prev = 0.0;
            p.iter()
                .map(|x| {
                    let d = x - prev;
                    prev = *x;
                    d
                })
                .collect()
        })
        .collect()
}

/// Pearson correlation matrix of the non-overlapping increments.
pub fn increment_correlations(paths: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let inc = increments(paths);
    let k = inc.first().map_or(0, Vec::len);
    let cols: Vec<Vec<f64>> = (0..k).map(|j| column(&inc, j)).collect();
    let mut out = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let c = if i == j && covariance(&cols[i], &cols[i]) > 0.0 {
                1.0
            } else {
                correlation(&cols[i], &cols[j])
            };
            out[i][j] = c;
            out[j][i] = c;
        }
    }
    out
}

/// Empirical characteristic-function check of a pair of times against the
/// Brownian target `exp(-u1^2 t1 / 2 - u2^2 (t2 - t1) / 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcfCheck {
    pub times: [f64; 2],
    pub probe: [f64; 2],
    /// `|phi_hat(u1, u2) - phi(u1, u2)|` for the pair (level, increment).
    pub joint_error: f64,
    /// `|phi_hat_1(u1) - exp(-u1^2 t1 / 2)|`.
    pub first_error: f64,
    /// `|phi_hat_2(u2) - exp(-u2^2 (t2 - t1) / 2)|`.
    pub increment_error: f64,
    /// `|phi_hat(u1, u2) - phi_hat_1(u1) phi_hat_2(u2)|`.
    pub independence_deficiency: f64,
}

/// ECF check on columns `(a, b)` of `paths`, sampled at `times`.
pub fn ecf_check(a: &[f64], b: &[f64], times: [f64; 2], probe: [f64; 2]) -> Result<EcfCheck> {
    let [t1, t2] = times;
    if !(t1 < t2) {
        return Err(Error::InvalidConfig("ECF times must satisfy t1 < t2".into()));
    }
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let [u1, u2] = probe;
    let r = a.len() as f64;
    let mut joint = Complex64::new(0.0, 0.0);
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    for (x1, x2) in a.iter().zip(b) {
        let d = x2 - x1;
        joint += Complex64::from_polar(1.0, u1 * x1 + u2 * d);
        first += Complex64::from_polar(1.0, u1 * x1);
        second += Complex64::from_polar(1.0, u2 * d);
    }
    joint /= r;
    first /= r;
    second /= r;
    let target1 = (-u1 * u1 * t1 / 2.0).exp();
    let target2 = (-u2 * u2 * (t2 - t1) / 2.0).exp();
    Ok(EcfCheck {
        times,
        probe,
        joint_error: (joint - target1 * target2).norm(),
        first_error: (first - target1).norm(),
        increment_error: (second - target2).norm(),
        independence_deficiency: (joint - first * second).norm(),
    })
}

/// Pearson chi-square test of independence on a `bins x bins` table of
/// empirical quantile classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

fn quantile_classes(xs: &[f64], bins: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]).then(i.cmp(&j)));
    let mut class = vec![0; xs.len()];
    for (rank, &i) in order.iter().enumerate() {
        class[i] = rank * bins / xs.len();
    }
    class
}

pub fn quantile_independence(x: &[f64], y: &[f64], bins: usize) -> Result<ChiSquareTest> {
    if bins < 2 {
        return Err(Error::InvalidConfig("need at least 2 bins".into()));
    }
    if x.len() != y.len() || x.len() < bins * bins {
        return Err(Error::InsufficientSamples {
            needed: bins * bins,
            available: x.len().min(y.len()),
        });
    }
    let cx = quantile_classes(x, bins);
    let cy = quantile_classes(y, bins);
    let mut table = vec![vec![0usize; bins]; bins];
    for (i, j) in cx.iter().zip(&cy) {
        table[*i][*j] += 1;
    }
    let n = x.len() as f64;
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<usize>() as f64).collect();
    let cols: Vec<f64> = (0..bins)
        .map(|j| table.iter().map(|r| r[j]).sum::<usize>() as f64)
        .collect();
    let mut statistic = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let expected = rows[i] * cols[j] / n;
            statistic += (table[i][j] as f64 - expected).powi(2) / expected;
        }
    }
    let df = (bins - 1) * (bins - 1);
    let p_value = 1.0 - ChiSquared::new(df as f64).expect("positive df").cdf(statistic);
    Ok(ChiSquareTest { statistic, df, p_value })
}

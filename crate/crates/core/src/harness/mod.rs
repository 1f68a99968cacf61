//! Finite-dimensional-distribution battery comparing pinned walk paths with
//! Brownian motion: marginal KS, covariance against `min(t_i, t_j)`,
//! increment decorrelation, empirical characteristic functions and the
//! Chebyshev bound on the interpolation remainder.

mod stats;

use std::fmt::Write as _;

use rand::RngExt;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use stats::{
    column, correlation, covariance, covariance_matrix, ecf_check, increment_correlations, increments,
    ks_p_proxy, ks_statistic, ks_statistic_degenerate, normal_cdf, quantile_independence, ChiSquareTest,
    EcfCheck,
};

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyVector;
use crate::random::{RngStream, SamplerSpec};
use crate::walk::{
    drift_gap, split_time, ChebyshevRow, Normalization, Pin, PinnedWalk, SigmaMode, WalkConfig,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const MIN_REPLICATES: usize = 100;

/// Master seed of the reference verification run.
pub const DEFAULT_SEED: u64 = 20_261_016;
pub const DEFAULT_REPLICATES: usize = 2000;

/// Reference configuration: standard Gaussian translations of a ten-level
/// square stack in the plane, pinned at `(1, (1, 0))`, `n = 400`, times
/// `(0.5, 1.0)`, exact normalization.
pub fn default_config() -> WalkConfig {
    let base = FuzzyVector::square_stack(10).expect("valid stack");
    WalkConfig {
        sampler: SamplerSpec::gaussian_translation(base, vec![0.0, 0.0], 1.0),
        n: 400,
        times: vec![0.5, 1.0],
        pin: Pin {
            alpha: 1.0,
            direction: vec![1.0, 0.0],
        },
        sigma_mode: SigmaMode::Exact,
    }
}

/// Pass thresholds and probe settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub ks_max: f64,
    /// Applies to the off-diagonal entries `|Cov(t_i, t_j) - min(t_i, t_j)|`, `i < j`.
    pub cov_max: f64,
    pub increment_corr_max: f64,
    pub ecf_max: f64,
    pub ecf_probe: [f64; 2],
    pub chebyshev_t: f64,
    pub chebyshev_epsilon: f64,
    pub chebyshev_slack: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            ks_max: 0.05,
            cov_max: 0.07,
            increment_corr_max: 0.08,
            ecf_max: 0.09,
            ecf_probe: [1.0, 1.0],
            chebyshev_t: 0.6,
            chebyshev_epsilon: 0.5,
            chebyshev_slack: 0.01,
        }
    }
}

/// Where the paths fed to the battery came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathSource {
    Walk,
    /// Exact Brownian finite-dimensional draws (null calibration).
    Brownian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalRow {
    pub t: f64,
    pub ks: f64,
    /// Asymptotic Kolmogorov approximation, not an exact p-value.
    pub p_proxy: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceBlock {
    pub matrix: Vec<Vec<f64>>,
    /// Largest `|Cov - min(t_i, t_j)|` over the whole matrix.
    pub max_abs_deviation: f64,
    /// Largest deviation over `i < j`; this is what is thresholded.
    pub max_off_diagonal_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementBlock {
    pub correlation: Vec<Vec<f64>>,
    pub max_abs_off_diagonal: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcfRow {
    #[serde(flatten)]
    pub check: EcfCheck,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevBlock {
    #[serde(flatten)]
    pub row: ChebyshevRow,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FddReport {
    pub schema_version: u32,
    pub config: WalkConfig,
    pub battery: BatteryConfig,
    pub source: PathSource,
    pub replicates: usize,
    pub seed: u64,
    /// `None` for synthetic Brownian input.
    pub normalization: Option<Normalization>,
    pub marginals: Vec<MarginalRow>,
    pub covariance: CovarianceBlock,
    pub increments: IncrementBlock,
    /// One row per consecutive pair of times.
    pub ecf: Vec<EcfRow>,
    pub chebyshev: ChebyshevBlock,
    pub passed: bool,
}

fn check_replicates(replicates: usize) -> Result<()> {
    if replicates < MIN_REPLICATES {
        return Err(Error::InsufficientSamples {
            needed: MIN_REPLICATES,
            available: replicates,
        });
    }
    Ok(())
}

/// Evaluates `f` on replicates `0..replicates` with at most `workers`
/// threads (`0` uses the rayon default), collecting in replicate order.
pub fn par_replicates<T, F>(replicates: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| (0..replicates as u64).into_par_iter().map(&f).collect())
}

/// Pinned paths of replicates `0..replicates`.
pub fn walk_paths(walk: &PinnedWalk, seed: u64, replicates: usize, workers: usize) -> Result<Vec<Vec<f64>>> {
    par_replicates(replicates, workers, |r| {
        walk.path(RngStream::new(seed, r)).map(|p| p.values)
    })
}

/// Exact Brownian draws `(b_{t_1}, ..., b_{t_k})`, replicate `r` on stream `r`.
pub fn brownian_paths(times: &[f64], seed: u64, replicates: usize) -> Vec<Vec<f64>> {
    (0..replicates as u64)
        .map(|r| {
            let mut rng = RngStream::new(seed, r).rng();
            let mut prev_t = 0.0;
            let mut b = 0.0;
            times
                .iter()
                .map(|&t| {
                    let z: f64 = rng.sample(StandardNormal);
                    b += (t - prev_t).sqrt() * z;
                    prev_t = t;
                    b
                })
                .collect()
        })
        .collect()
}

/// The interpolation remainder under the null: `frac(n t) |Z| / sqrt n`.
pub fn brownian_chebyshev(n: usize, seed: u64, t: f64, epsilon: f64, replicates: usize) -> ChebyshevRow {
    let (_, frac) = split_time(n, t);
    let exceed = (0..replicates as u64)
        .filter(|&r| {
            let z: f64 = RngStream::new(seed, r).rng().sample(StandardNormal);
            frac * z.abs() / (n as f64).sqrt() > epsilon
        })
        .count();
    ChebyshevRow {
        t,
        epsilon,
        exceed_rate: exceed as f64 / replicates as f64,
        bound: 1.0 / (epsilon * epsilon * n as f64),
        replicates,
    }
}

/// All statistics of the battery on a collected `R x k` path matrix.
pub fn evaluate_paths(
    times: &[f64],
    paths: &[Vec<f64>],
    battery: &BatteryConfig,
) -> Result<(Vec<MarginalRow>, CovarianceBlock, IncrementBlock, Vec<EcfRow>)> {
    if paths.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            available: paths.len(),
        });
    }
    if paths.iter().any(|p| p.len() != times.len()) {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: paths.iter().map(Vec::len).find(|l| *l != times.len()).unwrap_or(0),
        });
    }
    let r = paths.len();
    let marginals = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let col = column(paths, i);
            let ks = if t > 0.0 {
                ks_statistic(&col, t)?
            } else {
                ks_statistic_degenerate(&col)?
            };
            Ok(MarginalRow {
                t,
                ks,
                p_proxy: ks_p_proxy(ks, r),
                passed: ks <= battery.ks_max,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let matrix = covariance_matrix(paths);
    let mut max_abs: f64 = 0.0;
    let mut max_off: f64 = 0.0;
    for (i, row) in matrix.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let dev = (c - times[i].min(times[j])).abs();
            max_abs = max_abs.max(dev);
            if i < j {
                max_off = max_off.max(dev);
            }
        }
    }
    let covariance = CovarianceBlock {
        matrix,
        max_abs_deviation: max_abs,
        max_off_diagonal_deviation: max_off,
        passed: max_off <= battery.cov_max,
    };

    let correlation = increment_correlations(paths);
    let mut max_corr: f64 = 0.0;
    for (i, row) in correlation.iter().enumerate() {
        for c in &row[i + 1..] {
            max_corr = max_corr.max(c.abs());
        }
    }
    let increments = IncrementBlock {
        correlation,
        max_abs_off_diagonal: max_corr,
        passed: max_corr <= battery.increment_corr_max,
    };

    let ecf = (1..times.len())
        .map(|i| {
            let check = ecf_check(
                &column(paths, i - 1),
                &column(paths, i),
                [times[i - 1], times[i]],
                battery.ecf_probe,
            )?;
            Ok(EcfRow {
                passed: check.joint_error <= battery.ecf_max,
                check,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok((marginals, covariance, increments, ecf))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    cfg: &WalkConfig,
    battery: &BatteryConfig,
    source: PathSource,
    seed: u64,
    normalization: Option<Normalization>,
    paths: &[Vec<f64>],
    chebyshev: ChebyshevRow,
) -> Result<FddReport> {
    let (marginals, covariance, increments, ecf) = evaluate_paths(&cfg.times, paths, battery)?;
    let chebyshev = ChebyshevBlock {
        passed: chebyshev.exceed_rate <= chebyshev.bound + battery.chebyshev_slack,
        row: chebyshev,
    };
    let passed = marginals.iter().all(|m| m.passed)
        && covariance.passed
        && increments.passed
        && ecf.iter().all(|e| e.passed)
        && chebyshev.passed;
    Ok(FddReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        battery: battery.clone(),
        source,
        replicates: paths.len(),
        seed,
        normalization,
        marginals,
        covariance,
        increments,
        ecf,
        chebyshev,
        passed,
    })
}

/// Runs the battery on `replicates` pinned walk paths (streams
/// `0..replicates` of `seed`). The report does not depend on `workers`.
pub fn run_fdd(
    cfg: &WalkConfig,
    replicates: usize,
    seed: u64,
    battery: &BatteryConfig,
    workers: usize,
) -> Result<FddReport> {
    check_replicates(replicates)?;
    let walk = PinnedWalk::new(cfg.clone(), seed)?;
    let paths = walk_paths(&walk, seed, replicates, workers)?;
    let cheb = drift_gap(&walk, seed, battery.chebyshev_t, battery.chebyshev_epsilon, replicates)?;
    assemble(cfg, battery, PathSource::Walk, seed, Some(walk.normalization()), &paths, cheb)
}

/// The same battery fed exact Brownian draws at `cfg.times`.
pub fn run_null(cfg: &WalkConfig, replicates: usize, seed: u64, battery: &BatteryConfig) -> Result<FddReport> {
    check_replicates(replicates)?;
    cfg.validate()?;
    let paths = brownian_paths(&cfg.times, seed, replicates);
    let cheb = brownian_chebyshev(cfg.n, seed, battery.chebyshev_t, battery.chebyshev_epsilon, replicates);
    assemble(cfg, battery, PathSource::Brownian, seed, None, &paths, cheb)
}

/// Marginal KS at time index `time_index` for each seed, without the rest of
/// the battery.
pub fn marginal_ks_by_seed(
    cfg: &WalkConfig,
    replicates: usize,
    seeds: &[u64],
    time_index: usize,
    workers: usize,
) -> Result<Vec<f64>> {
    let t = *cfg
        .times
        .get(time_index)
        .ok_or_else(|| Error::InvalidConfig("time index out of range".into()))?;
    seeds
        .iter()
        .map(|&seed| {
            let walk = PinnedWalk::new(cfg.clone(), seed)?;
            let paths = walk_paths(&walk, seed, replicates, workers)?;
            ks_statistic(&column(&paths, time_index), t)
        })
        .collect()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `x,empirical,target` rows comparing the empirical CDF of `samples` with
/// that of `N(0, variance)`.
pub fn cdf_curve_csv(samples: &[f64], variance: f64) -> Result<String> {
    if !(variance > 0.0) {
        return Err(Error::NonPositiveVariance(variance));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out = String::from("x,empirical,target\n");
    for (i, x) in sorted.iter().enumerate() {
        let _ = writeln!(out, "{x:?},{:?},{:?}", (i + 1) as f64 / n, normal_cdf(*x, variance));
    }
    Ok(out)
}

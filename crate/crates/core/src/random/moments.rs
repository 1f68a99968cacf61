use serde::{Deserialize, Serialize};

use super::{RngStream, SamplerSpec};
use crate::convex::DirectionGrid;
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyVector, SupportSurface};

/// Pinned standard deviations below this are treated as zero.
pub const DEGENERATE_SIGMA: f64 = 1e-12;

/// Monte Carlo estimates of the Bochner mean surface and of the pointwise and
/// Frechet variances of a fuzzy random variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimates {
    pub mean_surface: SupportSurface,
    /// Unbiased per-entry variances, row-major like the mean surface.
    pub variance_surface: Vec<f64>,
    /// `sum_l sum_m w_l v_m Var s(a_l, u_m)`.
    pub frechet_variance: f64,
    pub sample_count: usize,
}

impl MomentEstimates {
    pub fn variance(&self, level: usize, direction: usize) -> f64 {
        self.variance_surface[level * self.mean_surface.cols() + direction]
    }
}

/// Entrywise Welford accumulator over support surfaces sharing one grid.
struct SurfaceAccumulator {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl SurfaceAccumulator {
    fn new(len: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    fn push(&mut self, values: &[f64]) {
        self.count += 1;
        let k = self.count as f64;
        for ((m, s), x) in self.mean.iter_mut().zip(&mut self.m2).zip(values) {
            let delta = x - *m;
            *m += delta / k;
            *s += delta * (x - *m);
        }
    }
}

/// Moments of an explicit list of draws (all on the same alpha grid).
pub fn estimate_moments_from(samples: &[FuzzyVector], grid: &DirectionGrid) -> Result<MomentEstimates> {
    if samples.len() < 2 {
        return Err(Error::InvalidConfig("moment estimation needs at least 2 draws".into()));
    }
    let alpha = samples[0].alpha().clone();
    let mut acc = SurfaceAccumulator::new(alpha.len() * grid.len());
    for x in samples {
        if x.alpha() != &alpha {
            return Err(Error::GridMismatch);
        }
        acc.push(x.support_surface(grid)?.values());
    }
    finish(acc, alpha, grid)
}

/// Draws `count` samples sequentially from `stream` and estimates their moments.
pub fn estimate_moments(
    spec: &SamplerSpec,
    grid: &DirectionGrid,
    count: usize,
    stream: RngStream,
) -> Result<MomentEstimates> {
    spec.validate()?;
    if count < 2 {
        return Err(Error::InvalidConfig("moment estimation needs at least 2 draws".into()));
    }
    let alpha = spec.base().alpha().clone();
    let mut acc = SurfaceAccumulator::new(alpha.len() * grid.len());
    let mut rng = stream.rng();
    for _ in 0..count {
        let x = spec.sample(&mut rng)?;
        acc.push(x.support_surface(grid)?.values());
    }
    finish(acc, alpha, grid)
}

fn finish(
    acc: SurfaceAccumulator,
    alpha: crate::fuzzy::AlphaGrid,
    grid: &DirectionGrid,
) -> Result<MomentEstimates> {
    let denom = (acc.count - 1) as f64;
    let variance_surface: Vec<f64> = acc.m2.iter().map(|s| (s / denom).max(0.0)).collect();
    let m = grid.len();
    let frechet_variance = alpha
        .weights()
        .iter()
        .enumerate()
        .map(|(l, wl)| {
            wl * grid
                .weights()
                .iter()
                .enumerate()
                .map(|(j, vm)| vm * variance_surface[l * m + j])
                .sum::<f64>()
        })
        .sum();
    let mean_surface = SupportSurface::new(alpha, grid.clone(), acc.mean)?;
    Ok(MomentEstimates {
        mean_surface,
        variance_surface,
        frechet_variance,
        sample_count: acc.count,
    })
}

/// Standard deviation of `s_X(alpha, u)`: closed form where the family has
/// one, otherwise the sample standard deviation of `count` draws.
pub fn pinned_sigma(
    spec: &SamplerSpec,
    alpha: f64,
    u: &[f64],
    count: usize,
    stream: RngStream,
) -> Result<f64> {
    spec.validate()?;
    let level = spec
        .base()
        .alpha()
        .index_of(alpha)
        .ok_or_else(|| Error::InvalidConfig(format!("alpha {alpha} is not on the sampler's grid")))?;
    let sigma = match spec.exact_pinned_sigma(level, u) {
        Ok(s) => s,
        Err(Error::NoClosedForm) => pinned_sample_moments(spec, level, u, count, stream)?.1,
        Err(e) => return Err(e),
    };
    if sigma < DEGENERATE_SIGMA {
        return Err(Error::DegenerateVariance(sigma));
    }
    Ok(sigma)
}

/// Sample mean and standard deviation of `s_X(a_level, u)` over `count` draws.
pub fn pinned_sample_moments(
    spec: &SamplerSpec,
    level: usize,
    u: &[f64],
    count: usize,
    stream: RngStream,
) -> Result<(f64, f64)> {
    if count < 2 {
        return Err(Error::InvalidConfig("need at least 2 draws".into()));
    }
    let mut rng = stream.rng();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=count {
        let x = spec.sample_pinned(&mut rng, level, u)?;
        let delta = x - mean;
        mean += delta / k as f64;
        m2 += delta * (x - mean);
    }
    Ok((mean, (m2 / (count - 1) as f64).max(0.0).sqrt()))
}

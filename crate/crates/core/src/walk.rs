//! The fuzzy random walk `S_k = X_1 (+) ... (+) X_k`, its linear
//! interpolation `L_t`, the normalization `M_{t,n} = L_{nt} / (sigma sqrt n)`,
//! and the drift-corrected pinned support process evaluated at one
//! `(alpha, u)`.
//!
//! Two routes are provided. The fuzzy route materializes the polytope stacks
//! and is used for cross-checks. The pinned route works directly on the
//! scalar sequence `s_{X_j}(alpha, u)` and is what the harness runs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::convex::norm;
use crate::error::{Error, Result};
use crate::fuzzy::{AlphaGrid, FuzzyVector};
use crate::random::{pinned_sample_moments, RngStream, SamplerSpec, DEGENERATE_SIGMA, PILOT_STREAM};

/// Pilot draws per unit of `n` when the normalization is estimated.
pub const DEFAULT_PILOT_FACTOR: usize = 10;

/// The fixed `(alpha, u)` at which support functions are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pin {
    pub alpha: f64,
    pub direction: Vec<f64>,
}

/// How the pinned standard deviation and the pinned mean are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaMode {
    Exact,
    /// Pilot estimate from the reserved stream; `pilot` defaults to `10 n`.
    Estimated { pilot: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub sampler: SamplerSpec,
    pub n: usize,
    pub times: Vec<f64>,
    pub pin: Pin,
    pub sigma_mode: SigmaMode,
}

impl WalkConfig {
    pub fn validate(&self) -> Result<usize> {
        self.sampler.validate()?;
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if self.times.is_empty() {
            return Err(Error::InvalidConfig("at least one time is required".into()));
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidConfig("times must be finite and >= 0".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("times must be strictly increasing".into()));
        }
        if self.pin.direction.len() != self.sampler.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.sampler.dim(),
                found: self.pin.direction.len(),
            });
        }
        if (norm(&self.pin.direction) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig("pin direction must be a unit vector".into()));
        }
        self.sampler
            .base()
            .alpha()
            .index_of(self.pin.alpha)
            .ok_or_else(|| {
                Error::InvalidConfig(format!("pin alpha {} is not on the sampler's grid", self.pin.alpha))
            })
    }
}

/// Resolved `sigma~` and `s_{m*}(alpha, u)` used to normalize and center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub sigma: f64,
    pub mean: f64,
    /// Pilot draws used; `None` for closed-form values.
    pub pilot_draws: Option<usize>,
}

impl Normalization {
    pub fn resolve(cfg: &WalkConfig, seed: u64) -> Result<Self> {
        let level = cfg.validate()?;
        let u = &cfg.pin.direction;
        let norm = match cfg.sigma_mode {
            SigmaMode::Exact => Normalization {
                sigma: cfg.sampler.exact_pinned_sigma(level, u)?,
                mean: cfg.sampler.exact_pinned_mean(level, u)?,
                pilot_draws: None,
            },
            SigmaMode::Estimated { pilot } => {
                let draws = pilot.unwrap_or(DEFAULT_PILOT_FACTOR * cfg.n).max(2);
                let (mean, sigma) =
                    pinned_sample_moments(&cfg.sampler, level, u, draws, RngStream::new(seed, PILOT_STREAM))?;
                Normalization {
                    sigma,
                    mean,
                    pilot_draws: Some(draws),
                }
            }
        };
        if !(norm.sigma >= DEGENERATE_SIGMA) {
            return Err(Error::DegenerateVariance(norm.sigma));
        }
        Ok(norm)
    }

    fn scale(&self, n: usize) -> f64 {
        self.sigma * (n as f64).sqrt()
    }
}

/// Splits `n t` into `(floor, fraction)`, snapping values within 1e-9 of an
/// integer onto it so that integer grid times carry no fractional weight.
pub fn split_time(n: usize, t: f64) -> (usize, f64) {
    let a = n as f64 * t;
    let r = a.round();
    if (a - r).abs() <= 1e-9 * a.max(1.0) {
        (r as usize, 0.0)
    } else {
        let k = a.floor();
        (k as usize, a - k)
    }
}

/// `S_k` for the first `k = xs.len()` summands; `S_0` is the crisp origin.
pub fn partial_sum(alpha: &AlphaGrid, dim: usize, xs: &[FuzzyVector]) -> Result<FuzzyVector> {
    let origin = FuzzyVector::crisp(alpha.clone(), vec![0.0; dim])?;
    xs.iter().try_fold(origin, |acc, x| acc.add(x))
}

/// `L_t = S_floor(t) (+) (t - floor t) (.) X_{floor(t)+1}`.
pub fn interpolated(alpha: &AlphaGrid, dim: usize, xs: &[FuzzyVector], t: f64) -> Result<FuzzyVector> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidConfig("t must be finite and >= 0".into()));
    }
    let (k, frac) = split_time(1, t);
    let needed = if frac > 0.0 { k + 1 } else { k };
    if needed > xs.len() {
        return Err(Error::InsufficientSamples {
            needed,
            available: xs.len(),
        });
    }
    let s = partial_sum(alpha, dim, &xs[..k])?;
    if frac > 0.0 {
        s.add(&xs[k].scale(frac)?)
    } else {
        Ok(s)
    }
}

/// `M_{t,n} = L_{nt} / (sigma sqrt n)`.
pub fn normalized(
    alpha: &AlphaGrid,
    dim: usize,
    xs: &[FuzzyVector],
    t: f64,
    n: usize,
    sigma: f64,
) -> Result<FuzzyVector> {
    if !(sigma >= DEGENERATE_SIGMA) {
        return Err(Error::DegenerateVariance(sigma));
    }
    let (k, frac) = split_time(n, t);
    interpolated(alpha, dim, xs, k as f64 + frac)?.scale(1.0 / (sigma * (n as f64).sqrt()))
}

/// Drift-corrected pinned values `s~_{M_{t_i,n}}(alpha, u)` of one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnedPath {
    pub replicate: u64,
    pub values: Vec<f64>,
}

/// A validated walk configuration with its normalization resolved.
#[derive(Debug, Clone)]
pub struct PinnedWalk {
    cfg: WalkConfig,
    level: usize,
    norm: Normalization,
}

impl PinnedWalk {
    /// Validates `cfg` and resolves the normalization (pilot draws, if any,
    /// come from the reserved stream of `seed`).
    pub fn new(cfg: WalkConfig, seed: u64) -> Result<Self> {
        let norm = Normalization::resolve(&cfg, seed)?;
        Self::with_normalization(cfg, norm)
    }

    pub fn with_normalization(cfg: WalkConfig, norm: Normalization) -> Result<Self> {
        let level = cfg.validate()?;
        if !(norm.sigma >= DEGENERATE_SIGMA) {
            return Err(Error::DegenerateVariance(norm.sigma));
        }
        Ok(Self { cfg, level, norm })
    }

    pub fn config(&self) -> &WalkConfig {
        &self.cfg
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Summands drawn per replicate: `floor(n t) + 1` for `t` the largest of
    /// `times` and `extra`.
    pub fn steps_for(&self, t_max: f64) -> usize {
        split_time(self.cfg.n, t_max).0 + 1
    }

    /// `s_{X_j}(alpha, u)` for `j = 1..=count` from one stream.
    pub fn scalars(&self, stream: RngStream, count: usize) -> Result<Vec<f64>> {
        let mut rng = stream.rng();
        (0..count)
            .map(|_| self.cfg.sampler.sample_pinned(&mut rng, self.level, &self.cfg.pin.direction))
            .collect()
    }

    /// The fuzzy summands themselves, drawn from the same stream positions.
    pub fn summands(&self, stream: RngStream, count: usize) -> Result<Vec<FuzzyVector>> {
        let mut rng = stream.rng();
        (0..count).map(|_| self.cfg.sampler.sample(&mut rng)).collect()
    }

    /// Sums of centered values over the blocks `(floor(n t_{i-1}), floor(n t_i)]`,
    /// each computed from its own slice only.
    pub fn centered_block_sums(&self, scalars: &[f64]) -> Result<Vec<f64>> {
        let mut prev = 0;
        let mut out = Vec::with_capacity(self.cfg.times.len());
        for &t in &self.cfg.times {
            let (k, _) = split_time(self.cfg.n, t);
            if k > scalars.len() {
                return Err(Error::InsufficientSamples {
                    needed: k,
                    available: scalars.len(),
                });
            }
            out.push(scalars[prev..k].iter().map(|s| s - self.norm.mean).sum());
            prev = k;
        }
        Ok(out)
    }

    /// Pinned path from a given scalar sequence `s_{X_1}, s_{X_2}, ...`.
    pub fn path_from_scalars(&self, scalars: &[f64]) -> Result<Vec<f64>> {
        let blocks = self.centered_block_sums(scalars)?;
        let scale = self.norm.scale(self.cfg.n);
        let mut cumulative = 0.0;
        let mut out = Vec::with_capacity(blocks.len());
        for (&t, block) in self.cfg.times.iter().zip(blocks) {
            cumulative += block;
            let (k, frac) = split_time(self.cfg.n, t);
            let tail = if frac > 0.0 {
                let next = scalars.get(k).ok_or(Error::InsufficientSamples {
                    needed: k + 1,
                    available: scalars.len(),
                })?;
                frac * (next - self.norm.mean)
            } else {
                0.0
            };
            out.push((cumulative + tail) / scale);
        }
        Ok(out)
    }

    /// One replicate on `stream`, sharing a single realization across times.
    pub fn path(&self, stream: RngStream) -> Result<PinnedPath> {
        let t_max = *self.cfg.times.last().expect("validated");
        let scalars = self.scalars(stream, self.steps_for(t_max))?;
        Ok(PinnedPath {
            replicate: stream.id,
            values: self.path_from_scalars(&scalars)?,
        })
    }

    /// Interpolation remainder
    /// `|s~_{M_{t,n}} - (s_{S_floor(nt)} - floor(nt) s_{m*}) / (sigma sqrt n)|`
    /// for one replicate.
    pub fn remainder(&self, stream: RngStream, t: f64) -> Result<f64> {
        let (k, frac) = split_time(self.cfg.n, t);
        let scalars = self.scalars(stream, k + 1)?;
        let scale = self.norm.scale(self.cfg.n);
        let centered: f64 = scalars[..k].iter().map(|s| s - self.norm.mean).sum();
        let full = (centered + frac * (scalars[k] - self.norm.mean)) / scale;
        Ok((full - centered / scale).abs())
    }
}

/// Pinned path of replicate `stream.id` with the normalization resolved from
/// `stream.seed`.
pub fn pinned_path(cfg: &WalkConfig, stream: RngStream) -> Result<PinnedPath> {
    PinnedWalk::new(cfg.clone(), stream.seed)?.path(stream)
}

/// Empirical check of the Chebyshev bound on the interpolation remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevRow {
    pub t: f64,
    pub epsilon: f64,
    pub exceed_rate: f64,
    /// `1 / (epsilon^2 n)`.
    pub bound: f64,
    pub replicates: usize,
}

/// Fraction of replicates `0..replicates` whose remainder at `t` exceeds `epsilon`.
pub fn drift_gap(walk: &PinnedWalk, seed: u64, t: f64, epsilon: f64, replicates: usize) -> Result<ChebyshevRow> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    if replicates == 0 {
        return Err(Error::InvalidConfig("at least one replicate is required".into()));
    }
    let mut exceed = 0usize;
    for r in 0..replicates as u64 {
        if walk.remainder(RngStream::new(seed, r), t)? > epsilon {
            exceed += 1;
        }
    }
    Ok(ChebyshevRow {
        t,
        epsilon,
        exceed_rate: exceed as f64 / replicates as f64,
        bound: 1.0 / (epsilon * epsilon * walk.cfg.n as f64),
        replicates,
    })
}

/// `replicate,t,value` rows for a batch of paths.
pub fn paths_to_csv(times: &[f64], paths: &[PinnedPath]) -> String {
    let mut out = String::from("replicate,t,value\n");
    for p in paths {
        for (t, v) in times.iter().zip(&p.values) {
            let _ = writeln!(out, "{},{t:?},{v:?}", p.replicate);
        }
    }
    out
}

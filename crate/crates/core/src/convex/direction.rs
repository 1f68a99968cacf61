use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;
const WEIGHT_TOL: f64 = 1e-12;
const MIN_DIRECTIONS: usize = 4;

/// Quadrature grid on the unit sphere: unit directions with positive weights
/// that sum to one (the normalized surface measure).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionGrid {
    dim: usize,
    directions: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGrid {
    dim: usize,
    directions: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl<'de> Deserialize<'de> for DirectionGrid {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawGrid::deserialize(de)?;
        DirectionGrid::new(raw.dim, raw.directions, raw.weights).map_err(serde::de::Error::custom)
    }
}

impl DirectionGrid {
    /// Builds a grid from explicit directions and weights, checking every invariant.
    pub fn new(dim: usize, directions: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if directions.len() < MIN_DIRECTIONS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_DIRECTIONS} directions, got {}",
                directions.len()
            )));
        }
        if weights.len() != directions.len() {
            return Err(Error::InvalidGrid("one weight per direction required".into()));
        }
        for u in &directions {
            if u.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: u.len(),
                });
            }
            if u.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("direction"));
            }
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidGrid(format!("direction {u:?} has norm {norm}")));
            }
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidGrid("weights must be positive and finite".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidGrid(format!("weights sum to {total}, not 1")));
        }
        Ok(Self {
            dim,
            directions,
            weights,
        })
    }

    /// Normalizes arbitrary non-zero vectors and assigns uniform weights.
    pub fn from_directions(dim: usize, raw: &[Vec<f64>]) -> Result<Self> {
        let mut directions = Vec::with_capacity(raw.len());
        for v in raw {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::InvalidGrid("direction must be finite and non-zero".into()));
            }
            directions.push(v.iter().map(|x| x / norm).collect());
        }
        let m = directions.len();
        Self::new(dim, directions, vec![1.0 / m as f64; m])
    }

    /// Equally spaced angles `2*pi*m/M` on the circle.
    pub fn circle(m: usize) -> Result<Self> {
        let directions = (0..m)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect();
        Self::new(2, directions, vec![1.0 / m as f64; m])
    }

    /// Fibonacci lattice on the 2-sphere.
    pub fn fibonacci_sphere(m: usize) -> Result<Self> {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let directions = (0..m)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = golden * i as f64;
                vec![r * phi.cos(), r * phi.sin(), z]
            })
            .collect();
        Self::new(3, directions, vec![1.0 / m as f64; m])
    }

    /// Halton points pushed through the normal quantile and projected onto the
    /// sphere; used for d > 3.
    pub fn halton_sphere(dim: usize, m: usize) -> Result<Self> {
        let primes = first_primes(dim);
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let mut directions = Vec::with_capacity(m);
        let mut index = 1u64;
        while directions.len() < m {
            let g: Vec<f64> = primes
                .iter()
                .map(|&p| normal.inverse_cdf(radical_inverse(index, p)))
                .collect();
            index += 1;
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                directions.push(g.iter().map(|x| x / norm).collect());
            }
        }
        Self::new(dim, directions, vec![1.0 / m as f64; m])
    }

    /// Default deterministic grid for a dimension: circle, Fibonacci sphere or Halton.
    pub fn for_dim(dim: usize, m: usize) -> Result<Self> {
        match dim {
            0 | 1 => Err(Error::UnsupportedDimension(dim)),
            2 => Self::circle(m),
            3 => Self::fibonacci_sphere(m),
            _ => Self::halton_sphere(dim, m),
        }
    }

    /// Appends extra directions (normalized) and resets to uniform weights.
    pub fn augmented(&self, extra: &[Vec<f64>]) -> Result<Self> {
        let mut all = self.directions.clone();
        all.extend(extra.iter().cloned());
        Self::from_directions(self.dim, &all)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.directions
            .iter()
            .map(Vec::as_slice)
            .zip(self.weights.iter().copied())
    }
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes.iter().all(|p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut result = 0.0;
    while index > 0 {
        result += (index % base) as f64 * inv;
        index /= base;
        inv /= base as f64;
    }
    result
}

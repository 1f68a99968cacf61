//! Families of iid fuzzy random variables.
//!
//! Each family randomizes a fixed base fuzzy vector:
//!
//! * `translation`: `X = base (+) {Z}` with `Z` Gaussian or uniform on a cube;
//! * `scaling`: `X = lambda (.) base` with `lambda ~ U[min, max]`, `min > 0`;
//! * `vertex-perturbation`: the vertices of the base's lowest cut are jittered,
//!   hulled, and shrunk toward their centroid by a non-increasing profile
//!   `g(a_l)` to form the levels.
//!
//! The first two have closed-form Bochner means and pinned variances.

use rand::{Rng, RngExt};
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::convex::{canonicalize, dot, norm, DirectionGrid, Polytope};
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyVector, SupportSurface};

/// Law of the random shift `Z` in the translation family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TranslationLaw {
    /// `Z = mean + sigma * N(0, I)`.
    Gaussian { mean: Vec<f64>, sigma: f64 },
    /// `Z = mean + U[-half_width, half_width]^d`.
    UniformCube { mean: Vec<f64>, half_width: f64 },
}

/// Law of the positive scale factor in the scaling family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScalingLaw {
    Uniform { min: f64, max: f64 },
}

/// Declarative description of an iid fuzzy random variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SamplerSpec {
    Translation {
        base: FuzzyVector,
        law: TranslationLaw,
    },
    Scaling {
        base: FuzzyVector,
        law: ScalingLaw,
    },
    VertexPerturbation {
        base: FuzzyVector,
        noise: f64,
        /// `g(a_l)` per alpha level, non-increasing with a positive last entry.
        shrink: Vec<f64>,
    },
}

impl SamplerSpec {
    pub fn gaussian_translation(base: FuzzyVector, mean: Vec<f64>, sigma: f64) -> Self {
        Self::Translation {
            base,
            law: TranslationLaw::Gaussian { mean, sigma },
        }
    }

    pub fn base(&self) -> &FuzzyVector {
        match self {
            Self::Translation { base, .. }
            | Self::Scaling { base, .. }
            | Self::VertexPerturbation { base, .. } => base,
        }
    }

    pub fn dim(&self) -> usize {
        self.base().dim()
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::Translation { .. } => "translation",
            Self::Scaling { .. } => "scaling",
            Self::VertexPerturbation { .. } => "vertex-perturbation",
        }
    }

    pub fn exact_mean_available(&self) -> bool {
        !matches!(self, Self::VertexPerturbation { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        let dim = self.dim();
        match self {
            Self::Translation { law, .. } => {
                let (mean, spread) = match law {
                    TranslationLaw::Gaussian { mean, sigma } => (mean, *sigma),
                    TranslationLaw::UniformCube { mean, half_width } => (mean, *half_width),
                };
                if mean.len() != dim {
                    return bad(format!("mean has {} coordinates, base has dim {dim}", mean.len()));
                }
                if mean.iter().any(|x| !x.is_finite()) || !spread.is_finite() || spread < 0.0 {
                    return bad("translation law parameters must be finite, spread >= 0".into());
                }
            }
            Self::Scaling {
                law: ScalingLaw::Uniform { min, max },
                ..
            } => {
                if !(min.is_finite() && max.is_finite() && *min > 0.0 && min <= max) {
                    return bad(format!("scaling law needs 0 < min <= max, got [{min}, {max}]"));
                }
            }
            Self::VertexPerturbation { base, noise, shrink } => {
                if !(noise.is_finite() && *noise >= 0.0) {
                    return bad("noise must be finite and >= 0".into());
                }
                if shrink.len() != base.alpha().len() {
                    return bad(format!(
                        "shrink profile has {} entries for {} levels",
                        shrink.len(),
                        base.alpha().len()
                    ));
                }
                if shrink.iter().any(|g| !g.is_finite()) || shrink.windows(2).any(|w| w[1] > w[0]) {
                    return bad("shrink profile must be finite and non-increasing".into());
                }
                if *shrink.last().unwrap() <= 0.0 {
                    return bad("shrink profile must end with g(1) > 0".into());
                }
            }
        }
        Ok(())
    }

    /// Draws one fuzzy vector.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<FuzzyVector> {
        match self {
            Self::Translation { base, law } => base.translated(&draw_shift(law, rng)),
            Self::Scaling { base, law } => base.scale(draw_scale(law, rng)),
            Self::VertexPerturbation { base, noise, shrink } => {
                let template = &base.cuts()[0];
                let jittered: Vec<Vec<f64>> = template
                    .vertices()
                    .iter()
                    .map(|v| {
                        v.iter()
                            .map(|x| x + noise * rng.sample::<f64, _>(StandardNormal))
                            .collect()
                    })
                    .collect();
                let hull = canonicalize(&jittered)?;
                let c = hull.vertex_centroid();
                let cuts = shrink
                    .iter()
                    .map(|g| {
                        let pts: Vec<Vec<f64>> = hull
                            .vertices()
                            .iter()
                            .map(|v| v.iter().zip(&c).map(|(x, ci)| ci + g * (x - ci)).collect())
                            .collect();
                        canonicalize(&pts)
                    })
                    .collect::<Result<Vec<Polytope>>>()?;
                Ok(FuzzyVector::from_valid_parts(base.alpha().clone(), cuts))
            }
        }
    }

    /// `s_X(a_level, u)` for one draw, consuming exactly the randomness that
    /// [`SamplerSpec::sample`] would.
    pub fn sample_pinned<R: Rng + ?Sized>(&self, rng: &mut R, level: usize, u: &[f64]) -> Result<f64> {
        match self {
            Self::Translation { base, law } => {
                let z = draw_shift(law, rng);
                Ok(base.support_at(level, u)? + dot(u, &z))
            }
            Self::Scaling { base, law } => {
                let lambda = draw_scale(law, rng);
                Ok(lambda * base.support_at(level, u)?)
            }
            Self::VertexPerturbation { .. } => self.sample(rng)?.support_at(level, u),
        }
    }

    /// Closed-form `E s_X(a_l, u)` at one grid point.
    pub fn exact_pinned_mean(&self, level: usize, u: &[f64]) -> Result<f64> {
        match self {
            Self::Translation { base, law } => {
                let mean = match law {
                    TranslationLaw::Gaussian { mean, .. } | TranslationLaw::UniformCube { mean, .. } => mean,
                };
                Ok(base.support_at(level, u)? + dot(u, mean))
            }
            Self::Scaling {
                base,
                law: ScalingLaw::Uniform { min, max },
            } => Ok(0.5 * (min + max) * base.support_at(level, u)?),
            Self::VertexPerturbation { .. } => Err(Error::NoClosedForm),
        }
    }

    /// Closed-form standard deviation of `s_X(a_l, u)`.
    pub fn exact_pinned_sigma(&self, level: usize, u: &[f64]) -> Result<f64> {
        match self {
            Self::Translation { law, .. } => Ok(match law {
                TranslationLaw::Gaussian { sigma, .. } => sigma * norm(u),
                TranslationLaw::UniformCube { half_width, .. } => half_width / 3f64.sqrt() * norm(u),
            }),
            Self::Scaling {
                base,
                law: ScalingLaw::Uniform { min, max },
            } => Ok((max - min) / 12f64.sqrt() * base.support_at(level, u)?.abs()),
            Self::VertexPerturbation { .. } => Err(Error::NoClosedForm),
        }
    }

    /// Closed-form Bochner mean surface `s_{E X}`.
    pub fn exact_mean_surface(&self, grid: &DirectionGrid) -> Result<SupportSurface> {
        self.validate()?;
        let base = self.base().support_surface(grid)?;
        match self {
            Self::Translation { law, .. } => {
                let mean = match law {
                    TranslationLaw::Gaussian { mean, .. } | TranslationLaw::UniformCube { mean, .. } => mean,
                };
                let shift: Vec<f64> = grid.directions().iter().map(|u| dot(u, mean)).collect();
                let m = grid.len();
                let values = base
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v + shift[i % m])
                    .collect();
                SupportSurface::new(base.alpha().clone(), grid.clone(), values)
            }
            Self::Scaling {
                law: ScalingLaw::Uniform { min, max },
                ..
            } => {
                let mean_lambda = 0.5 * (min + max);
                let values = base.values().iter().map(|v| mean_lambda * v).collect();
                SupportSurface::new(base.alpha().clone(), grid.clone(), values)
            }
            Self::VertexPerturbation { .. } => Err(Error::NoClosedForm),
        }
    }

    /// The same law applied to `lambda (.) X` for `lambda > 0` where the
    /// family is closed under positive scaling.
    pub fn scaled(&self, lambda: f64) -> Result<SamplerSpec> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidSpec("scale factor must be positive".into()));
        }
        match self {
            Self::Translation { base, law } => {
                let law = match law {
                    TranslationLaw::Gaussian { mean, sigma } => TranslationLaw::Gaussian {
                        mean: mean.iter().map(|x| lambda * x).collect(),
                        sigma: lambda * sigma,
                    },
                    TranslationLaw::UniformCube { mean, half_width } => TranslationLaw::UniformCube {
                        mean: mean.iter().map(|x| lambda * x).collect(),
                        half_width: lambda * half_width,
                    },
                };
                Ok(Self::Translation {
                    base: base.scale(lambda)?,
                    law,
                })
            }
            Self::Scaling { base, law } => Ok(Self::Scaling {
                base: base.scale(lambda)?,
                law: law.clone(),
            }),
            Self::VertexPerturbation { .. } => Err(Error::InvalidSpec(
                "vertex-perturbation family is not closed under scaling".into(),
            )),
        }
    }
}

fn draw_shift<R: Rng + ?Sized>(law: &TranslationLaw, rng: &mut R) -> Vec<f64> {
    match law {
        TranslationLaw::Gaussian { mean, sigma } => mean
            .iter()
            .map(|m| m + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect(),
        TranslationLaw::UniformCube { mean, half_width } => {
            let unit = Uniform::new(-1.0, 1.0).expect("valid range");
            mean.iter()
                .map(|m| m + half_width * unit.sample(rng))
                .collect()
        }
    }
}

fn draw_scale<R: Rng + ?Sized>(law: &ScalingLaw, rng: &mut R) -> f64 {
    match law {
        ScalingLaw::Uniform { min, max } => min + (max - min) * rng.random::<f64>(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::AlphaGrid;
    use crate::random::RngStream;

    fn square_stack() -> FuzzyVector {
        FuzzyVector::from_level_fn(AlphaGrid::uniform(4).unwrap(), |a| {
            let h = 1.0 - a / 2.0;
            Polytope::cube(2, -h, h)
        })
        .unwrap()
    }

    #[test]
    fn degenerate_translation_returns_base() {
        let spec = SamplerSpec::gaussian_translation(square_stack(), vec![0.0, 0.0], 0.0);
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..5 {
            assert_eq!(spec.sample(&mut rng).unwrap(), square_stack());
        }
    }

    #[test]
    fn unit_scaling_returns_base() {
        let spec = SamplerSpec::Scaling {
            base: square_stack(),
            law: ScalingLaw::Uniform { min: 1.0, max: 1.0 },
        };
        let mut rng = RngStream::new(1, 0).rng();
        assert_eq!(spec.sample(&mut rng).unwrap(), square_stack());
    }

    #[test]
    fn uniform_translation_moves_all_levels_together() {
        let base = square_stack();
        let spec = SamplerSpec::Translation {
            base: base.clone(),
            law: TranslationLaw::UniformCube {
                mean: vec![0.0, 0.0],
                half_width: 1.0,
            },
        };
        let mut rng = RngStream::new(9, 2).rng();
        for _ in 0..100 {
            let x = spec.sample(&mut rng).unwrap();
            let shift: Vec<f64> = (0..2)
                .map(|c| x.cuts()[0].vertices()[0][c] - base.cuts()[0].vertices()[0][c])
                .collect();
            assert!(shift.iter().all(|s| s.abs() <= 1.0));
            for (cut, b) in x.cuts().iter().zip(base.cuts()) {
                for (v, w) in cut.vertices().iter().zip(b.vertices()) {
                    assert!((v[0] - w[0] - shift[0]).abs() < 1e-12);
                    assert!((v[1] - w[1] - shift[1]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn vertex_perturbation_is_nested() {
        let spec = SamplerSpec::VertexPerturbation {
            base: square_stack(),
            noise: 0.3,
            shrink: vec![1.0, 0.8, 0.5, 0.2],
        };
        spec.validate().unwrap();
        let mut rng = RngStream::new(4, 0).rng();
        for _ in 0..50 {
            let x = spec.sample(&mut rng).unwrap();
            FuzzyVector::new(x.alpha().clone(), x.cuts().to_vec()).unwrap();
        }
    }

    #[test]
    fn pinned_fast_path_agrees_with_full_sample() {
        let u = [0.6, 0.8];
        for spec in [
            SamplerSpec::gaussian_translation(square_stack(), vec![0.5, -1.0], 2.0),
            SamplerSpec::Scaling {
                base: square_stack(),
                law: ScalingLaw::Uniform { min: 0.5, max: 3.0 },
            },
            SamplerSpec::VertexPerturbation {
                base: square_stack(),
                noise: 0.2,
                shrink: vec![1.0, 0.9, 0.7, 0.4],
            },
        ] {
            let mut a = RngStream::new(3, 1).rng();
            let mut b = RngStream::new(3, 1).rng();
            for _ in 0..20 {
                let full = spec.sample(&mut a).unwrap().support_at(2, &u).unwrap();
                let fast = spec.sample_pinned(&mut b, 2, &u).unwrap();
                assert!((full - fast).abs() < 1e-12, "{}", spec.family_name());
            }
        }
    }

    #[test]
    fn exact_means() {
        let grid = DirectionGrid::circle(8).unwrap();
        let base = square_stack().support_surface(&grid).unwrap();

        let centered = SamplerSpec::gaussian_translation(square_stack(), vec![0.0, 0.0], 1.0);
        assert_eq!(centered.exact_mean_surface(&grid).unwrap(), base);

        let shifted = SamplerSpec::gaussian_translation(square_stack(), vec![1.0, 0.0], 1.0);
        let s = shifted.exact_mean_surface(&grid).unwrap();
        for l in 0..4 {
            for (m, u) in grid.directions().iter().enumerate() {
                assert_eq!(s.get(l, m), base.get(l, m) + u[0]);
            }
        }

        let scaling = SamplerSpec::Scaling {
            base: square_stack(),
            law: ScalingLaw::Uniform { min: 1.0, max: 3.0 },
        };
        let s = scaling.exact_mean_surface(&grid).unwrap();
        for (a, b) in s.values().iter().zip(base.values()) {
            assert_eq!(*a, 2.0 * b);
        }

        let vp = SamplerSpec::VertexPerturbation {
            base: square_stack(),
            noise: 0.1,
            shrink: vec![1.0; 4],
        };
        assert_eq!(vp.exact_mean_surface(&grid), Err(Error::NoClosedForm));
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            SamplerSpec::gaussian_translation(square_stack(), vec![0.0], 1.0),
            SamplerSpec::gaussian_translation(square_stack(), vec![0.0, 0.0], -1.0),
            SamplerSpec::Scaling {
                base: square_stack(),
                law: ScalingLaw::Uniform { min: 0.0, max: 1.0 },
            },
            SamplerSpec::VertexPerturbation {
                base: square_stack(),
                noise: 0.1,
                shrink: vec![1.0, 1.2, 0.5, 0.1],
            },
            SamplerSpec::VertexPerturbation {
                base: square_stack(),
                noise: 0.1,
                shrink: vec![1.0, 0.5, 0.1, 0.0],
            },
        ];
        for spec in bad {
            assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))), "{spec:?}");
        }
    }

    #[test]
    fn json_uses_family_discriminator() {
        let spec = SamplerSpec::gaussian_translation(
            FuzzyVector::crisp(AlphaGrid::uniform(2).unwrap(), vec![0.0, 0.0]).unwrap(),
            vec![0.0, 0.0],
            1.0,
        );
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.starts_with(r#"{"family":"translation","base":{"alpha":[0.5,1.0]"#));
        assert!(text.contains(r#""law":{"kind":"gaussian","mean":[0.0,0.0],"sigma":1.0}"#));
        let back: SamplerSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}

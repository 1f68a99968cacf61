//! Seeded samplers for iid fuzzy random variables and estimators of their
//! Bochner mean, Frechet variance and pinned variance.

mod moments;
mod sampler;
mod stream;

pub use moments::{
    estimate_moments, estimate_moments_from, pinned_sample_moments, pinned_sigma, MomentEstimates,
    DEGENERATE_SIGMA,
};
pub use sampler::{SamplerSpec, ScalingLaw, TranslationLaw};
pub use stream::{RngStream, PILOT_STREAM};

/// Free-function forms.
pub fn sample(spec: &SamplerSpec, stream: RngStream) -> crate::Result<crate::fuzzy::FuzzyVector> {
    spec.validate()?;
    spec.sample(&mut stream.rng())
}

pub fn exact_mean_surface(
    spec: &SamplerSpec,
    grid: &crate::convex::DirectionGrid,
) -> crate::Result<crate::fuzzy::SupportSurface> {
    spec.exact_mean_surface(grid)
}

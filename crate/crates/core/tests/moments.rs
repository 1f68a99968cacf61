use fuzzy_donsker::convex::DirectionGrid;
use fuzzy_donsker::fuzzy::{AlphaGrid, FuzzyVector};
use fuzzy_donsker::harness::{correlation, quantile_independence};
use fuzzy_donsker::random::{
    estimate_moments, estimate_moments_from, RngStream, SamplerSpec, ScalingLaw, TranslationLaw,
};

fn gaussian(levels: usize, sigma: f64) -> SamplerSpec {
    SamplerSpec::gaussian_translation(FuzzyVector::square_stack(levels).unwrap(), vec![0.0, 0.0], sigma)
}

fn draws(spec: &SamplerSpec, count: usize, stream: RngStream) -> Vec<FuzzyVector> {
    let mut rng = stream.rng();
    (0..count).map(|_| spec.sample(&mut rng).unwrap()).collect()
}

#[test]
fn frechet_variance_of_unit_gaussian_translation() {
    let spec = gaussian(10, 1.0);
    let grid = DirectionGrid::circle(64).unwrap();
    let est = estimate_moments(&spec, &grid, 4000, RngStream::new(7, 0)).unwrap();
    assert!((0.9..=1.1).contains(&est.frechet_variance), "{}", est.frechet_variance);
    assert_eq!(est.sample_count, 4000);
}

#[test]
fn bochner_mean_is_positive_linear_on_shared_draws() {
    let grid = DirectionGrid::circle(16).unwrap();
    let x = draws(&gaussian(4, 1.0), 200, RngStream::new(1, 0));
    let scaling = SamplerSpec::Scaling {
        base: FuzzyVector::square_stack(4).unwrap(),
        law: ScalingLaw::Uniform { min: 0.5, max: 2.0 },
    };
    let y = draws(&scaling, 200, RngStream::new(1, 1));
    for (lambda, mu) in [(1.0, 1.0), (0.3, 2.5), (0.0, 1.7), (4.0, 0.0)] {
        let combined: Vec<FuzzyVector> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| a.scale(lambda).unwrap().add(&b.scale(mu).unwrap()).unwrap())
            .collect();
        let lhs = estimate_moments_from(&combined, &grid).unwrap().mean_surface;
        let mx = estimate_moments_from(&x, &grid).unwrap().mean_surface;
        let my = estimate_moments_from(&y, &grid).unwrap().mean_surface;
        let rhs = mx.positive_combination(lambda, &my, mu).unwrap();
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            assert!((a - b).abs() <= 1e-9, "{lambda},{mu}: {a} vs {b}");
        }
    }
}

#[test]
fn mean_surfaces_are_monotone_and_finite() {
    let grid = DirectionGrid::circle(32).unwrap();
    let specs = vec![
        gaussian(6, 1.0),
        SamplerSpec::Translation {
            base: FuzzyVector::square_stack(6).unwrap(),
            law: TranslationLaw::UniformCube {
                mean: vec![1.0, -1.0],
                half_width: 0.5,
            },
        },
        SamplerSpec::Scaling {
            base: FuzzyVector::square_stack(6).unwrap(),
            law: ScalingLaw::Uniform { min: 0.1, max: 3.0 },
        },
        SamplerSpec::VertexPerturbation {
            base: FuzzyVector::square_stack(6).unwrap(),
            noise: 0.3,
            shrink: vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.5],
        },
    ];
    for spec in specs {
        let est = estimate_moments(&spec, &grid, 500, RngStream::new(3, 0)).unwrap();
        let s = &est.mean_surface;
        for l in 1..s.rows() {
            for m in 0..s.cols() {
                assert!(s.get(l, m) <= s.get(l - 1, m) + 1e-9, "{}", spec.family_name());
            }
        }
        assert!(s.values().iter().all(|v| v.is_finite()));
        assert!(est.variance_surface.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}

#[test]
fn frechet_variance_ignores_crisp_shifts() {
    let grid = DirectionGrid::circle(16).unwrap();
    let scaling = SamplerSpec::Scaling {
        base: FuzzyVector::square_stack(5).unwrap(),
        law: ScalingLaw::Uniform { min: 0.2, max: 1.4 },
    };
    let x = draws(&scaling, 300, RngStream::new(4, 0));
    let c = vec![2.5, -1.25];
    let shifted: Vec<FuzzyVector> = x.iter().map(|v| v.translated(&c).unwrap()).collect();
    let a = estimate_moments_from(&x, &grid).unwrap().frechet_variance;
    let b = estimate_moments_from(&shifted, &grid).unwrap().frechet_variance;
    assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{a} vs {b}");
}

#[test]
fn independent_summands_add_variances() {
    let grid = DirectionGrid::circle(32).unwrap();
    let x = draws(&gaussian(4, 1.0), 4000, RngStream::new(5, 0));
    let y = draws(&gaussian(4, 0.5), 4000, RngStream::new(5, 1));
    let sum: Vec<FuzzyVector> = x.iter().zip(&y).map(|(a, b)| a.add(b).unwrap()).collect();
    let vx = estimate_moments_from(&x, &grid).unwrap().frechet_variance;
    let vy = estimate_moments_from(&y, &grid).unwrap().frechet_variance;
    let vs = estimate_moments_from(&sum, &grid).unwrap().frechet_variance;
    assert!((vs - (vx + vy)).abs() < 0.1, "{vs} vs {vx} + {vy}");
    assert!((vs - 1.25).abs() < 0.1, "{vs}");
}

#[test]
fn independent_streams_give_independent_pinned_values() {
    let spec = gaussian(4, 1.0);
    let level = spec.base().alpha().index_of(0.5).unwrap();
    let u = [0.6, 0.8];
    let pinned = |id| {
        let mut rng = RngStream::new(11, id).rng();
        (0..5000)
            .map(|_| spec.sample_pinned(&mut rng, level, &u).unwrap())
            .collect::<Vec<f64>>()
    };
    let (a, b) = (pinned(0), pinned(1));
    assert!(correlation(&a, &b).abs() <= 0.05);
    let test = quantile_independence(&a, &b, 4).unwrap();
    assert_eq!(test.df, 9);
    assert!(test.p_value > 0.01, "{test:?}");
}

#[test]
fn estimates_are_deterministic() {
    let spec = SamplerSpec::VertexPerturbation {
        base: FuzzyVector::square_stack(3).unwrap(),
        noise: 0.2,
        shrink: vec![1.0, 0.9, 0.8],
    };
    let grid = DirectionGrid::circle(16).unwrap();
    let a = estimate_moments(&spec, &grid, 100, RngStream::new(9, 4)).unwrap();
    let b = estimate_moments(&spec, &grid, 100, RngStream::new(9, 4)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = estimate_moments(&spec, &grid, 100, RngStream::new(9, 5)).unwrap();
    assert_ne!(a, c);
}

#[test]
fn exact_mean_of_translation_family() {
    let alpha = AlphaGrid::uniform(4).unwrap();
    let base = FuzzyVector::crisp(alpha, vec![0.0, 0.0]).unwrap();
    let spec = SamplerSpec::gaussian_translation(base, vec![1.0, 2.0], 0.5);
    let grid = DirectionGrid::circle(8).unwrap();
    let exact = spec.exact_mean_surface(&grid).unwrap();
    for (m, u) in grid.directions().iter().enumerate() {
        let target = u[0] + 2.0 * u[1];
        for l in 0..4 {
            assert!((exact.get(l, m) - target).abs() < 1e-15);
        }
    }
    let est = estimate_moments(&spec, &grid, 20000, RngStream::new(2, 0)).unwrap();
    for (a, b) in est.mean_surface.values().iter().zip(exact.values()) {
        assert!((a - b).abs() < 0.02);
    }
}

#[test]
fn sampler_json_round_trip() {
    let spec = SamplerSpec::Translation {
        base: FuzzyVector::square_stack(3).unwrap(),
        law: TranslationLaw::UniformCube {
            mean: vec![0.0, 1.0],
            half_width: 0.25,
        },
    };
    let text = serde_json::to_string(&spec).unwrap();
    assert!(text.contains("\"family\""));
    let back: SamplerSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
}

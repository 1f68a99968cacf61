mod common;

use common::*;
use fuzzy_donsker::convex::{
    hausdorff, hausdorff_exact_2d, reconstruct_2d, DirectionGrid, HalfspaceOracle, Polytope,
};
use proptest::prelude::*;

fn grid() -> DirectionGrid {
    DirectionGrid::circle(32).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn positive_homogeneity(p in polygon(), u in vector(), k in 0u32..8) {
        // powers of two keep the products exact
        let lambda = (1u64 << k) as f64 / 4.0;
        let scaled: Vec<f64> = u.iter().map(|x| lambda * x).collect();
        prop_assert_eq!(p.support_value(&scaled).unwrap(), lambda * p.support_value(&u).unwrap());
    }

    #[test]
    fn positive_homogeneity_general(p in polygon(), u in vector(), lambda in 0.0..10.0f64) {
        let scaled: Vec<f64> = u.iter().map(|x| lambda * x).collect();
        let lhs = p.support_value(&scaled).unwrap();
        let rhs = lambda * p.support_value(&u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn subadditivity(p in polygon(), u in vector(), v in vector()) {
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let lhs = p.support_value(&w).unwrap();
        let rhs = p.support_value(&u).unwrap() + p.support_value(&v).unwrap();
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs.abs()), "{lhs} > {rhs}");
    }

    #[test]
    fn minkowski_support_additivity(p in polygon(), q in polygon(), u in vector()) {
        let s = p.minkowski_sum(&q).unwrap();
        let gap = s.support_value(&u).unwrap() - p.support_value(&u).unwrap() - q.support_value(&u).unwrap();
        prop_assert!(gap.abs() <= 1e-9, "{gap}");
    }

    #[test]
    fn scaling_law(p in polygon(), u in vector(), lambda in 0.0..5.0f64) {
        let lhs = p.scale(lambda).unwrap().support_value(&u).unwrap();
        let rhs = lambda * p.support_value(&u).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn hausdorff_axioms(p in polygon(), q in polygon(), r in polygon()) {
        let g = grid();
        let pq = hausdorff(&p, &q, &g).unwrap();
        let qp = hausdorff(&q, &p, &g).unwrap();
        prop_assert_eq!(pq, qp);
        prop_assert!(hausdorff(&p, &p, &g).unwrap() <= 1e-12);
        let pr = hausdorff(&p, &r, &g).unwrap();
        let rq = hausdorff(&r, &q, &g).unwrap();
        prop_assert!(pq <= pr + rq + 1e-9);
        if pq <= 1e-12 {
            prop_assert_eq!(&p, &q);
        }
    }

    #[test]
    fn translate_distance_is_shift_norm(p in polygon(), v in vector()) {
        let q = p.translated(&v);
        let d = hausdorff_exact_2d(&p, &q).unwrap();
        let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
        prop_assert!((d - n).abs() <= 1e-9 * (1.0 + n));
    }

    #[test]
    fn reconstruction_round_trip(p in fat_polygon()) {
        let g = DirectionGrid::circle(16).unwrap().augmented(&p.edge_normals_2d()).unwrap();
        let oracle = HalfspaceOracle::from_polytope(&p, g).unwrap();
        match reconstruct_2d(&oracle) {
            Ok(back) => {
                prop_assert!(hausdorff_exact_2d(&back, &p).unwrap() <= 1e-9);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_hausdorff_matches_brute_force(p in polygon(), q in polygon()) {
        let exact = hausdorff_exact_2d(&p, &q).unwrap();
        let brute = brute_hausdorff(&p, &q);
        prop_assert!((exact - brute).abs() <= 1e-6, "exact {exact} brute {brute}");
    }
}

#[test]
fn reconstruction_of_degenerate_sets() {
    for p in [
        Polytope::singleton(vec![1.5, -2.0]).unwrap(),
        fuzzy_donsker::convex::canonicalize(&[vec![0.0, 0.0], vec![3.0, 1.0]]).unwrap(),
    ] {
        let mut extra = p.edge_normals_2d();
        extra.push(vec![1.0, 0.0]);
        let g = DirectionGrid::circle(8).unwrap().augmented(&extra).unwrap();
        let back = reconstruct_2d(&HalfspaceOracle::from_polytope(&p, g).unwrap()).unwrap();
        assert!(hausdorff_exact_2d(&back, &p).unwrap() <= 1e-9);
    }
}

#[test]
fn higher_dimensional_cube_support() {
    let c = Polytope::cube(3, -1.0, 1.0).unwrap();
    assert_eq!(c.vertices().len(), 8);
    assert_eq!(c.support_value(&[1.0, 1.0, 1.0]).unwrap(), 3.0);
    let t = c.translated(&[0.5, 0.0, 0.0]);
    let g = DirectionGrid::for_dim(3, 256).unwrap().augmented(&[vec![1.0, 0.0, 0.0]]).unwrap();
    assert!((hausdorff(&c, &t, &g).unwrap() - 0.5).abs() < 1e-12);
}

use super::FuzzyVector;
use crate::convex::{hausdorff, DirectionGrid};
use crate::error::{Error, Result};

/// Directions used for grid-approximate Hausdorff distances when d > 2.
pub const DEFAULT_METRIC_DIRECTIONS: usize = 512;

fn levelwise_hausdorff(x: &FuzzyVector, y: &FuzzyVector, grid: &DirectionGrid) -> Result<Vec<f64>> {
    if x.alpha() != y.alpha() {
        return Err(Error::GridMismatch);
    }
    x.cuts()
        .iter()
        .zip(y.cuts())
        .map(|(a, b)| hausdorff(a, b, grid))
        .collect()
}

fn default_grid(dim: usize) -> Result<DirectionGrid> {
    // planar distances are exact and ignore the grid
    let m = if dim == 2 { 4 } else { DEFAULT_METRIC_DIRECTIONS };
    DirectionGrid::for_dim(dim, m)
}

/// `d_p` on an explicit grid (the grid only matters for d > 2).
pub fn dist_p_on(x: &FuzzyVector, y: &FuzzyVector, p: f64, grid: &DirectionGrid) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidConfig(format!("p must lie in [1, inf), got {p}")));
    }
    let h = levelwise_hausdorff(x, y, grid)?;
    let total: f64 = x
        .alpha()
        .weights()
        .iter()
        .zip(&h)
        .map(|(w, d)| w * d.powf(p))
        .sum();
    Ok(total.powf(1.0 / p))
}

/// `d_p(x, y) = (sum_l w_l d_H(C_l(x), C_l(y))^p)^(1/p)`.
pub fn dist_p(x: &FuzzyVector, y: &FuzzyVector, p: f64) -> Result<f64> {
    dist_p_on(x, y, p, &default_grid(x.dim())?)
}

pub fn dist_inf_on(x: &FuzzyVector, y: &FuzzyVector, grid: &DirectionGrid) -> Result<f64> {
    Ok(levelwise_hausdorff(x, y, grid)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// `d_inf(x, y) = max_l d_H(C_l(x), C_l(y))`; the lowest grid level stands in
/// for the support closure at alpha = 0.
pub fn dist_inf(x: &FuzzyVector, y: &FuzzyVector) -> Result<f64> {
    dist_inf_on(x, y, &default_grid(x.dim())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{canonicalize, Polytope};
    use crate::fuzzy::AlphaGrid;

    #[test]
    fn crisp_pair_distance_is_norm() {
        let alpha = AlphaGrid::uniform(6).unwrap();
        let x = FuzzyVector::crisp(alpha.clone(), vec![0.0, 0.0]).unwrap();
        let y = FuzzyVector::crisp(alpha, vec![3.0, 4.0]).unwrap();
        for p in [1.0, 2.0, 7.0] {
            assert!((dist_p(&x, &y, p).unwrap() - 5.0).abs() < 1e-12);
        }
        assert_eq!(dist_inf(&x, &y).unwrap(), 5.0);
        assert_eq!(dist_p(&x, &x, 2.0).unwrap(), 0.0);
        assert_eq!(dist_inf(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn level_constant_cuts_reduce_to_hausdorff() {
        let alpha = AlphaGrid::uniform(4).unwrap();
        let p = Polytope::cube(2, 0.0, 1.0).unwrap();
        let q = canonicalize(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let x = FuzzyVector::new(alpha.clone(), vec![p.clone(); 4]).unwrap();
        let y = FuzzyVector::new(alpha, vec![q.clone(); 4]).unwrap();
        let h = crate::convex::hausdorff_exact_2d(&p, &q).unwrap();
        assert!((dist_p(&x, &y, 2.0).unwrap() - h).abs() < 1e-12);
        assert_eq!(dist_inf(&x, &y).unwrap(), h);
    }

    #[test]
    fn dist_inf_picks_outlier_level() {
        let alpha = AlphaGrid::uniform(4).unwrap();
        let base = Polytope::cube(2, -1.0, 1.0).unwrap();
        let x = FuzzyVector::new(alpha.clone(), vec![base.clone(); 4]).unwrap();
        // level 0 enlarged to [-3,3]^2 (distance 2*sqrt 2), others shrink by 0.1
        let cuts = vec![
            Polytope::cube(2, -3.0, 3.0).unwrap(),
            Polytope::cube(2, -0.9, 0.9).unwrap(),
            Polytope::cube(2, -0.9, 0.9).unwrap(),
            Polytope::cube(2, -0.9, 0.9).unwrap(),
        ];
        let y = FuzzyVector::new(alpha, cuts).unwrap();
        assert!((dist_inf(&x, &y).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_grids() {
        let x = FuzzyVector::crisp(AlphaGrid::uniform(3).unwrap(), vec![0.0, 0.0]).unwrap();
        let y = FuzzyVector::crisp(AlphaGrid::uniform(4).unwrap(), vec![0.0, 0.0]).unwrap();
        assert_eq!(dist_p(&x, &y, 1.0), Err(Error::GridMismatch));
        assert_eq!(dist_inf(&x, &y), Err(Error::GridMismatch));
    }
}

use super::{canonicalize, dot, DirectionGrid, Polytope, MEMBERSHIP_TOL};
use crate::error::{Error, Result};

/// Halfspace description `{x : <u_m, x> <= f_m for all m}` over a direction grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceOracle {
    grid: DirectionGrid,
    values: Vec<f64>,
}

impl HalfspaceOracle {
    pub fn new(grid: DirectionGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} support values for {} directions",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("support value"));
        }
        Ok(Self { grid, values })
    }

    /// Samples the support function of `p` on every grid direction.
    pub fn from_polytope(p: &Polytope, grid: DirectionGrid) -> Result<Self> {
        if p.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: p.dim(),
            });
        }
        let values = grid
            .directions()
            .iter()
            .map(|u| p.support_unchecked(u))
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &DirectionGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Membership up to `MEMBERSHIP_TOL` against every grid halfspace.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim(),
                found: x.len(),
            });
        }
        Ok(self
            .grid
            .directions()
            .iter()
            .zip(&self.values)
            .all(|(u, f)| dot(u, x) <= f + MEMBERSHIP_TOL))
    }
}

/// Intersects the planar halfspaces of `oracle` into a canonical polygon.
///
/// Candidate vertices are the pairwise intersections of boundary lines that
/// satisfy every constraint; their hull is the intersection.
pub fn reconstruct_2d(oracle: &HalfspaceOracle) -> Result<Polytope> {
    let grid = oracle.grid();
    if grid.dim() != 2 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let dirs = grid.directions();
    let f = oracle.values();
    check_bounded(dirs)?;

    let scale = f.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = MEMBERSHIP_TOL * scale;
    let feasible = |x: &[f64; 2]| dirs.iter().zip(f).all(|(u, fm)| dot(u, x) <= fm + tol);

    let mut points: Vec<Vec<f64>> = Vec::new();
    for i in 0..dirs.len() {
        for j in i + 1..dirs.len() {
            let (a, b) = (&dirs[i], &dirs[j]);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = [
                (f[i] * b[1] - f[j] * a[1]) / det,
                (a[0] * f[j] - b[0] * f[i]) / det,
            ];
            if feasible(&x) && !points.iter().any(|p| (p[0] - x[0]).hypot(p[1] - x[1]) <= tol) {
                points.push(x.to_vec());
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    canonicalize(&points)
}

/// The directions must positively span the plane: every angular gap < pi.
fn check_bounded(dirs: &[Vec<f64>]) -> Result<()> {
    let mut angles: Vec<f64> = dirs.iter().map(|u| u[1].atan2(u[0])).collect();
    angles.sort_by(f64::total_cmp);
    let mut max_gap = angles[0] + 2.0 * std::f64::consts::PI - angles[angles.len() - 1];
    for w in angles.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    if max_gap >= std::f64::consts::PI - 1e-12 {
        Err(Error::Unbounded)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::hausdorff_exact_2d;

    fn axes() -> DirectionGrid {
        DirectionGrid::from_directions(
            2,
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
        )
        .unwrap()
    }

    #[test]
    fn unit_square_from_axis_samples() {
        let sq = Polytope::cube(2, 0.0, 1.0).unwrap();
        let oracle = HalfspaceOracle::from_polytope(&sq, axes()).unwrap();
        assert_eq!(oracle.values(), &[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(reconstruct_2d(&oracle).unwrap(), sq);
    }

    #[test]
    fn singleton_from_any_grid() {
        let a = Polytope::singleton(vec![0.7, -1.3]).unwrap();
        for m in [4, 7, 32] {
            let oracle = HalfspaceOracle::from_polytope(&a, DirectionGrid::circle(m).unwrap()).unwrap();
            let r = reconstruct_2d(&oracle).unwrap();
            assert!(r.is_singleton());
            assert!(hausdorff_exact_2d(&r, &a).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn inconsistent_values_give_empty_intersection() {
        let oracle = HalfspaceOracle::new(axes(), vec![-1.0; 4]).unwrap();
        assert_eq!(reconstruct_2d(&oracle), Err(Error::EmptyIntersection));
    }

    #[test]
    fn half_plane_grid_is_unbounded() {
        let g = DirectionGrid::from_directions(
            2,
            &[vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 2.0]],
        )
        .unwrap();
        let oracle = HalfspaceOracle::new(g, vec![1.0; 4]).unwrap();
        assert_eq!(reconstruct_2d(&oracle), Err(Error::Unbounded));
    }

    #[test]
    fn membership() {
        let cube = Polytope::cube(3, 0.0, 1.0).unwrap();
        let grid = DirectionGrid::for_dim(3, 64)
            .unwrap()
            .augmented(&[
                vec![1.0, 0.0, 0.0],
                vec![-1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, -1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.0, 0.0, -1.0],
            ])
            .unwrap();
        let oracle = HalfspaceOracle::from_polytope(&cube, grid).unwrap();
        assert!(oracle.contains(&[0.5, 0.5, 0.5]).unwrap());
        assert!(!oracle.contains(&[2.0, 0.0, 0.0]).unwrap());
        assert!(oracle.contains(&[1.0, 1.0, 1.0]).unwrap());
        assert!(oracle.contains(&[0.5, 0.5]).is_err());

        let a = Polytope::singleton(vec![1.0, 2.0]).unwrap();
        let o = HalfspaceOracle::from_polytope(&a, DirectionGrid::circle(8).unwrap()).unwrap();
        assert!(o.contains(&[1.0, 2.0]).unwrap());
        assert!(!o.contains(&[1.0, 2.1]).unwrap());
    }
}

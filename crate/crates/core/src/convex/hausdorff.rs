use super::{norm, DirectionGrid, Polytope};
use crate::error::{Error, Result};

/// Hausdorff distance through support functions, `sup_u |s_P(u) - s_Q(u)|`.
///
/// In the plane the value is exact and `grid` is ignored. For d > 2 the sup
/// is taken over the grid directions only, so the result is a lower bound
/// that tightens as the grid is refined.
pub fn hausdorff(p: &Polytope, q: &Polytope, grid: &DirectionGrid) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if p.dim() == 2 {
        return hausdorff_exact_2d(p, q);
    }
    if grid.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: grid.dim(),
        });
    }
    Ok(grid
        .directions()
        .iter()
        .map(|u| (p.support_unchecked(u) - q.support_unchecked(u)).abs())
        .fold(0.0, f64::max))
}

/// Exact planar Hausdorff distance.
///
/// Between consecutive breakpoints of the merged normal fans both support
/// maximizers are fixed vertices `a` and `b`, so the difference of support
/// functions is `<u, a - b>`. Its modulus on such an arc peaks either at an
/// arc end (an edge normal) or at `u = +-(a - b)/|a - b|`. Evaluating at all
/// edge normals and all normalized vertex differences therefore covers every
/// candidate.
pub fn hausdorff_exact_2d(p: &Polytope, q: &Polytope) -> Result<f64> {
    if p.dim() != 2 || q.dim() != 2 {
        return Err(Error::UnsupportedDimension(p.dim().max(q.dim())));
    }
    let mut candidates = p.edge_normals_2d();
    candidates.extend(q.edge_normals_2d());
    for a in p.vertices() {
        for b in q.vertices() {
            let w = [a[0] - b[0], a[1] - b[1]];
            let n = norm(&w);
            if n > 0.0 {
                candidates.push(vec![w[0] / n, w[1] / n]);
                candidates.push(vec![-w[0] / n, -w[1] / n]);
            }
        }
    }
    Ok(candidates
        .iter()
        .map(|u| (p.support_unchecked(u) - q.support_unchecked(u)).abs())
        .fold(0.0, f64::max))
}

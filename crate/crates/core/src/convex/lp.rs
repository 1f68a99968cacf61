//! Phase-I simplex used to decide whether a point lies in the convex hull of
//! other points (extreme-point filtering for d > 2).

const PIVOT_EPS: f64 = 1e-13;
const MAX_PIVOTS: usize = 50_000;

/// Returns true when `p` is a convex combination of `others` up to `tol`.
///
/// Solves `sum_i l_i (q_i - p) = 0, sum_i l_i = 1, l >= 0` for feasibility.
pub(crate) fn in_hull(p: &[f64], others: &[&[f64]], tol: f64) -> bool {
    if others.is_empty() {
        return false;
    }
    let d = p.len();
    let k = others.len();
    let rows = d + 1;
    let cols = k + rows; // structural + artificial
    let width = cols + 1; // + rhs
    let mut tab = vec![0.0; rows * width];

    for (i, q) in others.iter().enumerate() {
        for c in 0..d {
            tab[c * width + i] = q[c] - p[c];
        }
        tab[d * width + i] = 1.0;
    }
    tab[d * width + cols] = 1.0;
    for r in 0..rows {
        tab[r * width + k + r] = 1.0;
    }

    // cost row for min sum(artificials), expressed in non-basic columns
    let mut cost = vec![0.0; width];
    for r in 0..rows {
        for j in 0..width {
            if j < k || j == cols {
                cost[j] -= tab[r * width + j];
            }
        }
    }
    let mut basis: Vec<usize> = (k..k + rows).collect();

    for _ in 0..MAX_PIVOTS {
        // Bland's rule: smallest index with negative reduced cost
        let Some(enter) = (0..cols).find(|&j| cost[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..rows {
            let a = tab[r * width + enter];
            if a > PIVOT_EPS {
                let ratio = tab[r * width + cols] / a;
                match leave {
                    None => leave = Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - PIVOT_EPS
                            || (ratio <= lratio + PIVOT_EPS && basis[r] < basis[lr])
                        {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((pr, _)) = leave else {
            // unbounded direction cannot occur in phase I; treat as done
            break;
        };
        let piv = tab[pr * width + enter];
        for j in 0..width {
            tab[pr * width + j] /= piv;
        }
        for r in 0..rows {
            if r != pr {
                let f = tab[r * width + enter];
                if f != 0.0 {
                    for j in 0..width {
                        tab[r * width + j] -= f * tab[pr * width + j];
                    }
                }
            }
        }
        let f = cost[enter];
        for j in 0..width {
            cost[j] -= f * tab[pr * width + j];
        }
        basis[pr] = enter;
    }

    let infeasibility: f64 = (0..rows)
        .filter(|&r| basis[r] >= k)
        .map(|r| tab[r * width + cols].abs())
        .sum();
    infeasibility <= tol
}

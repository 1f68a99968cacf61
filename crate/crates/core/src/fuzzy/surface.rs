use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{AlphaGrid, NESTED_TOL};
use crate::convex::DirectionGrid;
use crate::error::{Error, Result};

/// Support values on an (alpha level x direction) grid, stored row-major:
/// one row per level, one column per direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSurface {
    alpha: AlphaGrid,
    grid: DirectionGrid,
    values: Vec<f64>,
}

impl SupportSurface {
    /// Checks shape, finiteness, and that values do not increase with alpha.
    pub fn new(alpha: AlphaGrid, grid: DirectionGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != alpha.len() * grid.len() {
            return Err(Error::InvalidGrid(format!(
                "surface has {} values, expected {}x{}",
                values.len(),
                alpha.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("support surface"));
        }
        let s = Self {
            alpha,
            grid,
            values,
        };
        s.check_monotone()?;
        Ok(s)
    }

    pub(crate) fn from_valid_parts(alpha: AlphaGrid, grid: DirectionGrid, values: Vec<f64>) -> Self {
        Self {
            alpha,
            grid,
            values,
        }
    }

    pub fn alpha(&self) -> &AlphaGrid {
        &self.alpha
    }

    pub fn grid(&self) -> &DirectionGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> usize {
        self.alpha.len()
    }

    pub fn cols(&self) -> usize {
        self.grid.len()
    }

    pub fn get(&self, level: usize, direction: usize) -> f64 {
        self.values[level * self.grid.len() + direction]
    }

    pub fn row(&self, level: usize) -> &[f64] {
        let m = self.grid.len();
        &self.values[level * m..(level + 1) * m]
    }

    /// Property (iv): for every direction the value is non-increasing in alpha.
    pub fn check_monotone(&self) -> Result<()> {
        for l in 1..self.rows() {
            for m in 0..self.cols() {
                let excess = self.get(l, m) - self.get(l - 1, m);
                if excess > NESTED_TOL {
                    return Err(Error::NotNested {
                        outer: l - 1,
                        inner: l,
                        direction: m,
                        excess,
                    });
                }
            }
        }
        Ok(())
    }

    /// `lambda * S + mu * T` for non-negative coefficients (the positive cone).
    pub fn positive_combination(&self, lambda: f64, other: &Self, mu: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        if !(lambda >= 0.0 && mu >= 0.0 && lambda.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidConfig(
                "positive combination needs finite non-negative coefficients".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| lambda * a + mu * b)
            .collect();
        Ok(Self::from_valid_parts(
            self.alpha.clone(),
            self.grid.clone(),
            values,
        ))
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.alpha == other.alpha && self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// CSV: header `alpha` then one column per direction (coordinates joined
    /// by spaces), then one row per alpha level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha");
        for u in self.grid.directions() {
            let coords: Vec<String> = u.iter().map(|x| format!("{x:?}")).collect();
            let _ = write!(out, ",{}", coords.join(" "));
        }
        out.push('\n');
        for (l, a) in self.alpha.levels().iter().enumerate() {
            let _ = write!(out, "{a:?}");
            for v in self.row(l) {
                let _ = write!(out, ",{v:?}");
            }
            out.push('\n');
        }
        out
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("p must lie in [1, inf), got {p}")))
    }
}

/// `rho_p(S, T) = (sum_l sum_m w_l v_m |S - T|^p)^(1/p)`.
pub fn rho_p(s: &SupportSurface, t: &SupportSurface, p: f64) -> Result<f64> {
    check_p(p)?;
    s.check_same_grid(t)?;
    let m = s.cols();
    let mut total = 0.0;
    for (l, wl) in s.alpha.weights().iter().enumerate() {
        let row: f64 = s.grid.weights()
            .iter()
            .enumerate()
            .map(|(j, vm)| vm * (s.values[l * m + j] - t.values[l * m + j]).abs().powf(p))
            .sum();
        total += wl * row;
    }
    Ok(total.powf(1.0 / p))
}

/// `rho_inf(S, T) = max |S - T|` over the grid.
pub fn rho_inf(s: &SupportSurface, t: &SupportSurface) -> Result<f64> {
    s.check_same_grid(t)?;
    Ok(s.values
        .iter()
        .zip(&t.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

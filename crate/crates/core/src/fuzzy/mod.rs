//! Fuzzy vectors as nested stacks of alpha-cut polytopes.
//!
//! A fuzzy vector is carried by its cuts on a finite alpha grid. Arithmetic
//! acts levelwise through Minkowski operations, and the support surface
//! (support values over alpha levels times sphere directions) is the
//! discretized image of the embedding into L^p((0,1] x S^{d-1}).

mod metric;
mod surface;

use serde::{Deserialize, Serialize};

use crate::convex::{DirectionGrid, Polytope};
use crate::error::{Error, Result};

pub use metric::{dist_inf, dist_inf_on, dist_p, dist_p_on};
pub use surface::{rho_inf, rho_p, SupportSurface};

/// Tolerance for the nestedness (alpha-monotonicity) checks.
pub const NESTED_TOL: f64 = 1e-9;
const VALIDATION_DIRECTIONS: usize = 64;

/// Alpha levels `0 < a_1 < ... < a_L = 1` with quadrature weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAlphaGrid")]
pub struct AlphaGrid {
    levels: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawAlphaGrid {
    levels: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<RawAlphaGrid> for AlphaGrid {
    type Error = Error;
    fn try_from(raw: RawAlphaGrid) -> Result<Self> {
        AlphaGrid::new(raw.levels, raw.weights)
    }
}

impl AlphaGrid {
    pub fn new(levels: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidGrid("alpha grid needs at least one level".into()));
        }
        if weights.len() != levels.len() {
            return Err(Error::InvalidGrid("one weight per alpha level required".into()));
        }
        if levels.iter().chain(&weights).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("alpha grid"));
        }
        if levels[0] <= 0.0 || levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("levels must be strictly increasing in (0,1]".into()));
        }
        if *levels.last().unwrap() != 1.0 {
            return Err(Error::InvalidGrid("last alpha level must be exactly 1".into()));
        }
        if weights.iter().any(|w| *w <= 0.0) {
            return Err(Error::InvalidGrid("alpha weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidGrid(format!("alpha weights sum to {total}")));
        }
        Ok(Self { levels, weights })
    }

    /// Right-endpoint rule on (0,1]: weight of level l is `a_l - a_{l-1}`.
    /// Levels exactly equal to `l/L` get the exact weights `1/L`.
    pub fn from_levels(levels: Vec<f64>) -> Result<Self> {
        let n = levels.len() as f64;
        if !levels.is_empty()
            && levels
                .iter()
                .enumerate()
                .all(|(l, &a)| a == (l + 1) as f64 / n)
        {
            return Self::uniform(levels.len());
        }
        let weights = levels
            .iter()
            .scan(0.0, |prev, &a| {
                let w = a - *prev;
                *prev = a;
                Some(w)
            })
            .collect();
        Self::new(levels, weights)
    }

    /// `a_l = l/L`, weights `1/L`.
    pub fn uniform(levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidGrid("alpha grid needs at least one level".into()));
        }
        let n = levels as f64;
        Self::new(
            (1..=levels).map(|l| l as f64 / n).collect(),
            vec![1.0 / n; levels],
        )
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Index of a level that is exactly on the grid.
    pub fn index_of(&self, alpha: f64) -> Option<usize> {
        self.levels.iter().position(|&a| a == alpha)
    }
}

/// A d-dimensional fuzzy vector: one convex polytope per alpha level, nested
/// so that higher levels sit inside lower ones.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyVector {
    alpha: AlphaGrid,
    cuts: Vec<Polytope>,
}

impl Serialize for FuzzyVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("FuzzyVector", 2)?;
        let implied = AlphaGrid::from_levels(self.alpha.levels.clone()).ok();
        if implied.as_ref() == Some(&self.alpha) {
            st.serialize_field("alpha", &self.alpha.levels)?;
        } else {
            st.serialize_field("alpha", &self.alpha)?;
        }
        st.serialize_field("cuts", &self.cuts)?;
        st.end()
    }
}

/// On-disk form: bare levels (weights follow the right-endpoint rule) or a
/// full grid object.
#[derive(Deserialize)]
#[serde(untagged)]
enum RawAlpha {
    Levels(Vec<f64>),
    Grid(AlphaGrid),
}

#[derive(Deserialize)]
struct RawFuzzyVector {
    alpha: RawAlpha,
    cuts: Vec<Polytope>,
}

impl<'de> Deserialize<'de> for FuzzyVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFuzzyVector::deserialize(de)?;
        let alpha = match raw.alpha {
            RawAlpha::Levels(l) => AlphaGrid::from_levels(l),
            RawAlpha::Grid(g) => Ok(g),
        }
        .map_err(serde::de::Error::custom)?;
        FuzzyVector::new(alpha, raw.cuts).map_err(serde::de::Error::custom)
    }
}

impl FuzzyVector {
    /// Validates dimensions and nestedness of the cut stack.
    pub fn new(alpha: AlphaGrid, cuts: Vec<Polytope>) -> Result<Self> {
        if cuts.len() != alpha.len() {
            return Err(Error::InvalidGrid(format!(
                "{} cuts for {} alpha levels",
                cuts.len(),
                alpha.len()
            )));
        }
        let dim = cuts[0].dim();
        if let Some(bad) = cuts.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        check_nested(&cuts)?;
        Ok(Self { alpha, cuts })
    }

    /// Stack that is nested by construction (levelwise image of a valid stack).
    pub(crate) fn from_valid_parts(alpha: AlphaGrid, cuts: Vec<Polytope>) -> Self {
        Self { alpha, cuts }
    }

    /// Every level equal to the singleton `{point}`.
    pub fn crisp(alpha: AlphaGrid, point: Vec<f64>) -> Result<Self> {
        let p = Polytope::singleton(point)?;
        let cuts = vec![p; alpha.len()];
        Ok(Self { alpha, cuts })
    }

    /// Builds the stack by evaluating `cut` at every level.
    pub fn from_level_fn<F>(alpha: AlphaGrid, cut: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Polytope>,
    {
        let cuts = alpha.levels().iter().map(|&a| cut(a)).collect::<Result<_>>()?;
        Self::new(alpha, cuts)
    }

    /// Centered squares `[-(1 - a/2), 1 - a/2]^2` on the uniform grid with
    /// `levels` levels.
    pub fn square_stack(levels: usize) -> Result<Self> {
        Self::from_level_fn(AlphaGrid::uniform(levels)?, |a| {
            let h = 1.0 - a / 2.0;
            Polytope::cube(2, -h, h)
        })
    }

    /// The hull of `points` shrunk toward its vertex centroid by `1 - a/2` at
    /// level `a`.
    pub fn shrinking_hull(alpha: AlphaGrid, points: &[Vec<f64>]) -> Result<Self> {
        let hull = crate::convex::canonicalize(points)?;
        let c = hull.vertex_centroid();
        let neg: Vec<f64> = c.iter().map(|x| -x).collect();
        let centered = hull.translated(&neg);
        Self::from_level_fn(alpha, |a| Ok(centered.scale(1.0 - a / 2.0)?.translated(&c)))
    }

    pub fn alpha(&self) -> &AlphaGrid {
        &self.alpha
    }

    pub fn cuts(&self) -> &[Polytope] {
        &self.cuts
    }

    pub fn dim(&self) -> usize {
        self.cuts[0].dim()
    }

    /// `s_x(a_l, u)` for one level index.
    pub fn support_at(&self, level: usize, u: &[f64]) -> Result<f64> {
        self.cuts[level].support_value(u)
    }

    /// The discretized embedding `j(x)` on a direction grid.
    pub fn support_surface(&self, grid: &DirectionGrid) -> Result<SupportSurface> {
        if grid.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: grid.dim(),
            });
        }
        let values = self
            .cuts
            .iter()
            .flat_map(|c| grid.directions().iter().map(move |u| c.support_unchecked(u)))
            .collect();
        Ok(SupportSurface::from_valid_parts(
            self.alpha.clone(),
            grid.clone(),
            values,
        ))
    }

    /// Levelwise Minkowski sum `x (+) y`.
    pub fn add(&self, other: &FuzzyVector) -> Result<FuzzyVector> {
        if self.alpha != other.alpha {
            return Err(Error::GridMismatch);
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let cuts = self
            .cuts
            .iter()
            .zip(&other.cuts)
            .map(|(a, b)| a.minkowski_sum(b))
            .collect::<Result<_>>()?;
        Ok(Self::from_valid_parts(self.alpha.clone(), cuts))
    }

    /// Levelwise scaling `lambda (.) x`.
    pub fn scale(&self, lambda: f64) -> Result<FuzzyVector> {
        let cuts = self
            .cuts
            .iter()
            .map(|c| c.scale(lambda))
            .collect::<Result<_>>()?;
        Ok(Self::from_valid_parts(self.alpha.clone(), cuts))
    }

    /// `x (+) {t}`.
    pub fn translated(&self, t: &[f64]) -> Result<FuzzyVector> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: t.len(),
            });
        }
        let cuts = self.cuts.iter().map(|c| c.translated(t)).collect();
        Ok(Self::from_valid_parts(self.alpha.clone(), cuts))
    }

    /// Membership degree `max{a_l : x in C_{a_l}}`, zero outside the lowest cut.
    /// Planar fuzzy vectors only.
    pub fn membership_2d(&self, x: &[f64]) -> Result<f64> {
        let mut degree = 0.0;
        for (a, cut) in self.alpha.levels().iter().zip(&self.cuts) {
            if cut.contains_2d(x)? {
                degree = *a;
            } else {
                break;
            }
        }
        Ok(degree)
    }
}

fn check_nested(cuts: &[Polytope]) -> Result<()> {
    let dim = cuts[0].dim();
    let mut dirs: Vec<Vec<f64>> = DirectionGrid::for_dim(dim, VALIDATION_DIRECTIONS)?
        .directions()
        .to_vec();
    if dim == 2 {
        for c in cuts {
            dirs.extend(c.edge_normals_2d());
            if c.vertices().len() == 2 {
                let (a, b) = (&c.vertices()[0], &c.vertices()[1]);
                let e = [b[0] - a[0], b[1] - a[1]];
                let n = e[0].hypot(e[1]);
                dirs.push(vec![e[0] / n, e[1] / n]);
                dirs.push(vec![-e[0] / n, -e[1] / n]);
            }
        }
    }
    let table: Vec<Vec<f64>> = cuts
        .iter()
        .map(|c| dirs.iter().map(|u| c.support_unchecked(u)).collect())
        .collect();
    for outer in 0..cuts.len() {
        for inner in outer + 1..cuts.len() {
            for (m, (hi, lo)) in table[inner].iter().zip(&table[outer]).enumerate() {
                if *hi > lo + NESTED_TOL {
                    return Err(Error::NotNested {
                        outer,
                        inner,
                        direction: m,
                        excess: hi - lo,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Free-function forms.
pub fn fuzzy_add(x: &FuzzyVector, y: &FuzzyVector) -> Result<FuzzyVector> {
    x.add(y)
}

pub fn fuzzy_scale(lambda: f64, x: &FuzzyVector) -> Result<FuzzyVector> {
    x.scale(lambda)
}

pub fn support_surface(x: &FuzzyVector, grid: &DirectionGrid) -> Result<SupportSurface> {
    x.support_surface(grid)
}

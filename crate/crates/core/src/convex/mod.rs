//! Non-empty compact convex subsets of R^d stored as canonical vertex lists.
//!
//! Every set is kept as the list of its extreme points. In the plane the list
//! runs counterclockwise from the lexicographically smallest vertex, so two
//! polytopes describing the same set compare equal vertex by vertex.

mod direction;
mod halfspace;
mod hausdorff;
mod lp;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use direction::DirectionGrid;
pub use halfspace::{reconstruct_2d, HalfspaceOracle};
pub use hausdorff::{hausdorff, hausdorff_exact_2d};

/// Points closer than this are merged during canonicalization.
pub const DEDUP_TOL: f64 = 1e-12;
/// Slack for halfspace membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A non-empty compact convex polytope given by its extreme points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawPolytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPolytope::deserialize(de)?;
        if let Some(v) = raw.vertices.iter().find(|v| v.len() != raw.dim) {
            return Err(serde::de::Error::custom(Error::DimensionMismatch {
                expected: raw.dim,
                found: v.len(),
            }));
        }
        canonicalize(&raw.vertices).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Convex hull of a finite point list in canonical form.
pub fn canonicalize(points: &[Vec<f64>]) -> Result<Polytope> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let dim = first.len();
    if dim < 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("polytope vertex"));
        }
    }

    let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
    sorted.sort_by(|a, b| lex_cmp(a, b));
    let mut unique: Vec<Vec<f64>> = Vec::with_capacity(sorted.len());
    for p in sorted {
        if !unique.iter().any(|q| dist(p, q) <= DEDUP_TOL) {
            unique.push(p.clone());
        }
    }

    let vertices = if dim == 2 {
        hull_2d(unique)
    } else {
        extreme_points(unique)
    };
    Ok(Polytope { dim, vertices })
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Strict left turn, with collinear (sine below 1e-12) treated as not a turn.
fn left_turn(o: &[f64], a: &[f64], b: &[f64]) -> bool {
    let c = cross(o, a, b);
    c > DEDUP_TOL * dist(o, a) * dist(o, b)
}

/// Andrew's monotone chain; input sorted lexicographically and deduplicated.
fn hull_2d(pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !left_turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p) {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !left_turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p) {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && dist(&lower[0], &lower[1]) <= DEDUP_TOL {
        lower.truncate(1);
    }
    lower
}

/// Keeps points that are not convex combinations of the remaining ones.
fn extreme_points(pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    if pts.len() <= 2 {
        return pts;
    }
    let scale = pts
        .iter()
        .flat_map(|p| p.iter().map(|x| x.abs()))
        .fold(1.0f64, f64::max);
    let tol = 1e-10 * scale;
    let mut keep = vec![true; pts.len()];
    for i in 0..pts.len() {
        let others: Vec<&[f64]> = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i && keep[j])
            .map(|(_, p)| p.as_slice())
            .collect();
        if lp::in_hull(&pts[i], &others, tol) {
            keep[i] = false;
        }
    }
    pts.into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

impl Polytope {
    /// The one-point set `{a}`.
    pub fn singleton(point: Vec<f64>) -> Result<Self> {
        canonicalize(&[point])
    }

    /// The origin of R^d.
    pub fn origin(dim: usize) -> Result<Self> {
        Self::singleton(vec![0.0; dim])
    }

    /// Axis-aligned box `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        let corners: Vec<Vec<f64>> = (0..1usize << dim)
            .map(|mask| {
                (0..dim)
                    .map(|k| if mask >> k & 1 == 1 { hi } else { lo })
                    .collect()
            })
            .collect();
        canonicalize(&corners)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Vertex average (not the area centroid).
    pub fn vertex_centroid(&self) -> Vec<f64> {
        let k = self.vertices.len() as f64;
        (0..self.dim)
            .map(|c| self.vertices.iter().map(|v| v[c]).sum::<f64>() / k)
            .collect()
    }

    /// `s_P(u) = max_v <u, v>`, defined for every `u` in R^d.
    pub fn support_value(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u.len())?;
        Ok(self.support_unchecked(u))
    }

    pub(crate) fn support_unchecked(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(u, v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Minkowski sum `P + Q`.
    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        self.check_dim(other.dim)?;
        if other.is_singleton() {
            return Ok(self.translated(&other.vertices[0]));
        }
        if self.is_singleton() {
            return Ok(other.translated(&self.vertices[0]));
        }
        let sums: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .flat_map(|a| {
                other
                    .vertices
                    .iter()
                    .map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect())
            })
            .collect();
        canonicalize(&sums)
    }

    /// `lambda * P`.
    pub fn scale(&self, lambda: f64) -> Result<Polytope> {
        if !lambda.is_finite() {
            return Err(Error::NonFinite("scale factor"));
        }
        if lambda == 0.0 {
            return Polytope::origin(self.dim);
        }
        let pts: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| lambda * x).collect())
            .collect();
        canonicalize(&pts)
    }

    /// `P + {t}`. Translation preserves the canonical order.
    pub fn translated(&self, t: &[f64]) -> Polytope {
        Polytope {
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().zip(t).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    /// Outward edge normals (unit) of a planar polygon; a segment yields its
    /// two normals and a point yields none.
    pub fn edge_normals_2d(&self) -> Vec<Vec<f64>> {
        if self.dim != 2 || self.vertices.len() < 2 {
            return Vec::new();
        }
        let k = self.vertices.len();
        let edges = if k == 2 { 1 } else { k };
        let mut out = Vec::with_capacity(2 * edges);
        for i in 0..edges {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % k];
            let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
            let len = (ex * ex + ey * ey).sqrt();
            out.push(vec![ey / len, -ex / len]);
            if k == 2 {
                out.push(vec![-ey / len, ex / len]);
            }
        }
        out
    }

    /// Point-in-polygon for d = 2 (boundary counts as inside, with tolerance).
    pub fn contains_2d(&self, x: &[f64]) -> Result<bool> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        self.check_dim(x.len())?;
        match self.vertices.len() {
            1 => Ok(dist(&self.vertices[0], x) <= MEMBERSHIP_TOL),
            2 => Ok(point_segment_distance(x, &self.vertices[0], &self.vertices[1]) <= MEMBERSHIP_TOL),
            _ => Ok(self
                .edge_normals_2d()
                .iter()
                .enumerate()
                .all(|(i, n)| dot(n, x) <= dot(n, &self.vertices[i]) + MEMBERSHIP_TOL)),
        }
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            })
        }
    }
}

pub(crate) fn point_segment_distance(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = b.iter().zip(a).map(|(p, q)| p - q).collect();
    let ax: Vec<f64> = x.iter().zip(a).map(|(p, q)| p - q).collect();
    let len2 = dot(&ab, &ab);
    let t = if len2 > 0.0 {
        (dot(&ax, &ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let closest: Vec<f64> = a.iter().zip(&ab).map(|(p, d)| p + t * d).collect();
    dist(x, &closest)
}

/// Free-function forms of the set operations.
pub fn support_value(p: &Polytope, u: &[f64]) -> Result<f64> {
    p.support_value(u)
}

pub fn minkowski_sum(p: &Polytope, q: &Polytope) -> Result<Polytope> {
    p.minkowski_sum(q)
}

pub fn scale_set(lambda: f64, p: &Polytope) -> Result<Polytope> {
    p.scale(lambda)
}

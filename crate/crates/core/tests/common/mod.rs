#![allow(dead_code)]

use fuzzy_donsker::convex::{canonicalize, Polytope};
use fuzzy_donsker::fuzzy::{AlphaGrid, FuzzyVector};
use proptest::prelude::*;

pub fn point() -> impl Strategy<Value = Vec<f64>> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| vec![x, y])
}

pub fn polygon() -> impl Strategy<Value = Polytope> {
    prop::collection::vec(point(), 1..12).prop_map(|pts| canonicalize(&pts).unwrap())
}

/// Polygon with at least three random input points (may still be degenerate
/// only with probability zero).
pub fn fat_polygon() -> impl Strategy<Value = Polytope> {
    prop::collection::vec(point(), 3..12).prop_map(|pts| canonicalize(&pts).unwrap())
}

pub fn direction() -> impl Strategy<Value = Vec<f64>> {
    (0.0..std::f64::consts::TAU).prop_map(|t| vec![t.cos(), t.sin()])
}

pub fn vector() -> impl Strategy<Value = Vec<f64>> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| vec![x, y])
}

/// `A (+) (1 - a) B` with `B` centered at its vertex centroid, so cuts shrink
/// as the level rises.
pub fn nested(alpha: AlphaGrid, a: &Polytope, b: &Polytope) -> FuzzyVector {
    let c: Vec<f64> = b.vertex_centroid().iter().map(|x| -x).collect();
    let b0 = b.translated(&c);
    FuzzyVector::from_level_fn(alpha, |lvl| a.minkowski_sum(&b0.scale(1.0 - lvl)?)).unwrap()
}

pub fn fuzzy(levels: usize) -> impl Strategy<Value = FuzzyVector> {
    (polygon(), polygon()).prop_map(move |(a, b)| nested(AlphaGrid::uniform(levels).unwrap(), &a, &b))
}

fn seg_dist(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let len2 = ex * ex + ey * ey;
    let t = if len2 > 0.0 {
        (((x[0] - a[0]) * ex + (x[1] - a[1]) * ey) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((x[0] - a[0] - t * ex).powi(2) + (x[1] - a[1] - t * ey).powi(2)).sqrt()
}

/// Euclidean distance from `x` to a convex polygon given by CCW vertices.
pub fn point_polygon_distance(x: &[f64], verts: &[Vec<f64>]) -> f64 {
    let k = verts.len();
    if k == 1 {
        return seg_dist(x, &verts[0], &verts[0]);
    }
    if k >= 3 {
        let inside = (0..k).all(|i| {
            let a = &verts[i];
            let b = &verts[(i + 1) % k];
            (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= 0.0
        });
        if inside {
            return 0.0;
        }
    }
    (0..k)
        .map(|i| seg_dist(x, &verts[i], &verts[(i + 1) % k]))
        .fold(f64::INFINITY, f64::min)
}

/// Points along the boundary of a polygon, `per_edge` per edge.
pub fn boundary_samples(verts: &[Vec<f64>], per_edge: usize) -> Vec<Vec<f64>> {
    let k = verts.len();
    let mut out = Vec::new();
    for i in 0..k {
        let a = &verts[i];
        let b = &verts[(i + 1) % k];
        for s in 0..per_edge {
            let t = s as f64 / per_edge as f64;
            out.push(vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Hausdorff distance from the max-min definition over dense boundary points.
pub fn brute_hausdorff(p: &Polytope, q: &Polytope) -> f64 {
    let directed = |a: &Polytope, b: &Polytope| {
        boundary_samples(a.vertices(), 200)
            .iter()
            .map(|x| point_polygon_distance(x, b.vertices()))
            .fold(0.0, f64::max)
    };
    directed(p, q).max(directed(q, p))
}

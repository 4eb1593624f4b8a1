use std::sync::Arc;

use nalgebra::{Matrix2, Point2};

use super::PiecewiseAffineMap;
use crate::geometry::TriMesh;

/// Closed-form harmonic map `u = e^{x/2} cos(y e^{-x})`, `v = e^{x/2} sin(y e^{-x})`
/// on an axis-aligned rectangle. Its Jacobian determinant is identically 1/2,
/// yet on `[0,1] x [0,4pi]` it wraps the image around twice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticMap {
    pub min: Point2<f64>,
    pub max: Point2<f64>,
}

impl Default for AnalyticMap {
    fn default() -> Self {
        AnalyticMap {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(1.0, 4.0 * std::f64::consts::PI),
        }
    }
}

impl AnalyticMap {
    pub fn new(min: Point2<f64>, max: Point2<f64>) -> Self {
        AnalyticMap { min, max }
    }

    pub fn contains(&self, p: &Point2<f64>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn eval(&self, p: &Point2<f64>) -> Point2<f64> {
        let r = (p.x / 2.0).exp();
        let theta = p.y * (-p.x).exp();
        Point2::new(r * theta.cos(), r * theta.sin())
    }

    pub fn jacobian(&self, p: &Point2<f64>) -> Matrix2<f64> {
        let r = (p.x / 2.0).exp();
        let e = (-p.x).exp();
        let theta = p.y * e;
        let (s, c) = theta.sin_cos();
        Matrix2::new(
            r * (0.5 * c + theta * s),
            -r * s * e,
            r * (0.5 * s - theta * c),
            r * c * e,
        )
    }

    /// Central-difference Jacobian with step `step`.
    pub fn fd_jacobian(&self, p: &Point2<f64>, step: f64) -> Matrix2<f64> {
        let dx = nalgebra::Vector2::new(step, 0.0);
        let dy = nalgebra::Vector2::new(0.0, step);
        let gx = (self.eval(&(p + dx)) - self.eval(&(p - dx))) / (2.0 * step);
        let gy = (self.eval(&(p + dy)) - self.eval(&(p - dy))) / (2.0 * step);
        Matrix2::from_columns(&[gx, gy])
    }

    /// Piecewise-affine interpolant on an `nx x ny` structured mesh.
    pub fn discretize(&self, nx: usize, ny: usize) -> PiecewiseAffineMap {
        let mesh = TriMesh::rectangle(self.min, self.max, nx, ny);
        let image = mesh.nodes().iter().map(|p| self.eval(p)).collect();
        PiecewiseAffineMap::new(Arc::new(mesh), image)
    }

    /// Images of `per_side` points on each rectangle side, counter-clockwise
    /// from `min`.
    pub fn boundary_trace(&self, per_side: usize) -> Vec<Point2<f64>> {
        let corners = [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ];
        let mut out = Vec::with_capacity(4 * per_side);
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            for i in 0..per_side {
                out.push(self.eval(&(a + (b - a) * (i as f64 / per_side as f64))));
            }
        }
        out
    }
}

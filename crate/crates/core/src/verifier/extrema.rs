use nalgebra::{Point2, Vector2};
use serde::Serialize;

use crate::mapping::PiecewiseAffineMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremaRecord {
    pub alpha: f64,
    pub n_max: usize,
    pub n_min: usize,
    /// Smallest `|grad f_alpha|` over all triangles; `NaN` when no map
    /// gradient is available.
    pub min_grad: f64,
}

impl ExtremaRecord {
    pub fn is_unimodal(&self) -> bool {
        self.n_max == 1 && self.n_min == 1
    }
}

/// `alpha_k = k pi / count` for `k = 0..count`.
pub fn alpha_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| std::f64::consts::PI * k as f64 / count as f64)
        .collect()
}

/// Numbers of strict local maximum and minimum runs of a cyclic sequence.
/// Values within `1e-10` of the value range are merged into one plateau.
pub fn count_cyclic_extrema(values: &[f64]) -> (usize, usize) {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let tol = 1e-10 * (hi - lo);
    let mut runs: Vec<f64> = Vec::new();
    for &v in values {
        if runs.last().is_none_or(|&r| (v - r).abs() > tol) {
            runs.push(v);
        }
    }
    while runs.len() > 1 && (runs[0] - runs[runs.len() - 1]).abs() <= tol {
        runs.pop();
    }
    let m = runs.len();
    if m < 2 {
        return (0, 0);
    }
    let mut n_max = 0;
    let mut n_min = 0;
    for i in 0..m {
        let (prev, next) = (runs[(i + m - 1) % m], runs[(i + 1) % m]);
        if runs[i] > prev && runs[i] > next {
            n_max += 1;
        }
        if runs[i] < prev && runs[i] < next {
            n_min += 1;
        }
    }
    (n_max, n_min)
}

/// Extrema counts of `f_alpha = cos(alpha) u + sin(alpha) v` along a closed
/// image polyline.
pub fn polyline_extrema(points: &[Point2<f64>], alpha: f64) -> (usize, usize) {
    let d = Vector2::new(alpha.cos(), alpha.sin());
    let values: Vec<f64> = points.iter().map(|p| p.coords.dot(&d)).collect();
    count_cyclic_extrema(&values)
}

/// Directional extrema along the outer boundary loop of the source mesh,
/// plus the smallest gradient norm of `f_alpha` over all triangles.
pub fn directional_extrema_profile(map: &PiecewiseAffineMap, alphas: &[f64]) -> Vec<ExtremaRecord> {
    let mesh = map.source_mesh();
    let image = map.image_nodes();
    let boundary: Vec<Point2<f64>> = mesh
        .boundary_loops()
        .first()
        .map(|lp| lp.iter().map(|&i| image[i]).collect())
        .unwrap_or_default();
    let jacobians: Vec<_> = (0..mesh.triangle_count()).map(|t| map.jacobian(t)).collect();
    alphas
        .iter()
        .map(|&alpha| {
            let (n_max, n_min) = polyline_extrema(&boundary, alpha);
            let d = Vector2::new(alpha.cos(), alpha.sin());
            let min_grad = jacobians
                .iter()
                .map(|j| (j.transpose() * d).norm())
                .fold(f64::INFINITY, f64::min);
            ExtremaRecord {
                alpha,
                n_max,
                n_min,
                min_grad,
            }
        })
        .collect()
}

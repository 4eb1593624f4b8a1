use nalgebra::Point2;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{segments_intersect, signed_area, triangle_penetration, BoundingBox, Polygon};
use crate::mapping::{HarmonicMap, PiecewiseAffineMap};

/// At most this many overlapping pairs are stored; all are counted.
pub const MAX_REPORTED_OVERLAPS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityReport {
    /// Every image triangle has strictly positive signed area.
    pub orientation_ok: bool,
    pub inverted_count: usize,
    /// Sum of signed image areas divided by the target area.
    pub area_ratio: f64,
    pub overlap_count: usize,
    /// Overlapping image triangle pairs `(i, j)` with `i < j`, truncated.
    pub overlaps: Vec<(usize, usize)>,
}

impl InjectivityReport {
    pub fn is_injective(&self) -> bool {
        self.orientation_ok && self.overlap_count == 0
    }
}

/// Orientation, area and pairwise-overlap check of the image triangulation.
pub fn check_injectivity(map: &PiecewiseAffineMap, target_area: f64) -> InjectivityReport {
    let n = map.source_mesh().triangle_count();
    let areas: Vec<f64> = (0..n).map(|t| map.image_area(t)).collect();
    let inverted_count = areas.iter().filter(|&&a| !(a > 0.0)).count();
    let area_ratio = areas.iter().sum::<f64>() / target_area;

    let grid = map.image_grid();
    let tol = 1e-10 * grid.bounding_box().extent();
    let ranges: Vec<(usize, usize, usize, usize)> = (0..n)
        .map(|t| {
            let tri = map.image_triangle(t);
            grid.cell_range(&BoundingBox::from_points(tri.iter()).unwrap())
        })
        .collect();
    let (nx, ny) = grid.dims();
    let per_cell: Vec<Vec<(usize, usize)>> = (0..nx * ny)
        .into_par_iter()
        .map(|c| {
            let (ix, iy) = (c % nx, c / nx);
            let items = grid.cell_items(ix, iy);
            let mut pairs = Vec::new();
            for (a, &ti) in items.iter().enumerate() {
                let (ti, ri) = (ti as usize, ranges[ti as usize]);
                let tri_i = map.image_triangle(ti);
                for &tj in &items[a + 1..] {
                    let (tj, rj) = (tj as usize, ranges[tj as usize]);
                    // Test each pair only in the first cell both touch.
                    if ix != ri.0.max(rj.0) || iy != ri.2.max(rj.2) {
                        continue;
                    }
                    if triangle_penetration(&tri_i, &map.image_triangle(tj)) > tol {
                        pairs.push((ti.min(tj), ti.max(tj)));
                    }
                }
            }
            pairs
        })
        .collect();
    let mut overlaps: Vec<(usize, usize)> = per_cell.into_iter().flatten().collect();
    overlaps.sort_unstable();
    let overlap_count = overlaps.len();
    overlaps.truncate(MAX_REPORTED_OVERLAPS);
    InjectivityReport {
        orientation_ok: inverted_count == 0,
        inverted_count,
        area_ratio,
        overlap_count,
        overlaps,
    }
}

/// True iff every image boundary loop is a simple polyline with the
/// orientation of its target loop (outer counter-clockwise, holes clockwise),
/// and source vertices reach the target vertices in cyclic order.
pub fn check_boundary_orientation(map: &HarmonicMap) -> bool {
    let Some(target) = map.target_polygon() else {
        return false;
    };
    let mesh = map.affine().source_mesh();
    let image = map.image_nodes();
    let source = map.source();
    let offsets = source.loop_offsets();
    let tol = 1e-12 * target.bounding_box().extent();
    for (li, lp) in mesh.boundary_loops().iter().enumerate() {
        let pts: Vec<Point2<f64>> = lp.iter().map(|&i| image[i]).collect();
        let area = signed_area(&pts);
        if (li == 0 && !(area > 0.0)) || (li > 0 && !(area < 0.0)) {
            return false;
        }
        if !polyline_is_simple(&pts, tol) {
            return false;
        }
        // Source vertex k must land on target vertex (k + s) mod n for a fixed s.
        let tloop = target.loop_points(li);
        let n = tloop.len();
        let hit: Option<Vec<usize>> = (0..n)
            .map(|k| {
                let w = map.targets()[offsets[li] + k];
                tloop.iter().position(|t| (t - w).norm() <= tol)
            })
            .collect();
        let Some(hit) = hit else { return false };
        if (0..n).any(|k| hit[(k + 1) % n] != (hit[k] + 1) % n) {
            return false;
        }
    }
    true
}

/// Closed polyline without repeated points or crossings between
/// non-adjacent segments.
pub fn polyline_is_simple(pts: &[Point2<f64>], tol: f64) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    if (0..n).any(|i| (pts[(i + 1) % n] - pts[i]).norm() <= tol) {
        return false;
    }
    let bb: Vec<BoundingBox> = (0..n)
        .map(|i| BoundingBox::from_points([&pts[i], &pts[(i + 1) % n]]).unwrap())
        .collect();
    (0..n).into_par_iter().all(|i| {
        ((i + 2)..n).all(|j| {
            if i == 0 && j == n - 1 {
                return true;
            }
            let (a, b) = (&bb[i], &bb[j]);
            if a.max.x + tol < b.min.x || b.max.x + tol < a.min.x || a.max.y + tol < b.min.y || b.max.y + tol < a.min.y {
                return true;
            }
            !segments_intersect(&pts[i], &pts[(i + 1) % n], &pts[j], &pts[(j + 1) % n], tol)
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageReport {
    pub probes: usize,
    pub inverted: usize,
    pub ambiguous: usize,
    pub outside: usize,
    pub fraction: f64,
}

/// Probes the centers of an `r x r` grid over the target bounding box; points
/// inside the target and farther than 1e-9 from its boundary count, and a
/// probe succeeds when it has exactly one preimage.
pub fn check_surjectivity(map: &PiecewiseAffineMap, target: &Polygon, r: usize) -> CoverageReport {
    assert!(r >= 1, "resolution must be positive");
    let bb = target.bounding_box();
    let probes: Vec<Point2<f64>> = (0..r * r)
        .map(|k| {
            let (i, j) = (k % r, k / r);
            Point2::new(
                bb.min.x + bb.width() * (i as f64 + 0.5) / r as f64,
                bb.min.y + bb.height() * (j as f64 + 0.5) / r as f64,
            )
        })
        .filter(|p| target.contains_strict(p) && target.boundary_distance(p) > 1e-9)
        .collect();
    let counts: Vec<usize> = probes.par_iter().map(|w| map.preimages(w).len()).collect();
    let inverted = counts.iter().filter(|&&c| c == 1).count();
    let ambiguous = counts.iter().filter(|&&c| c > 1).count();
    let outside = counts.iter().filter(|&&c| c == 0).count();
    CoverageReport {
        probes: probes.len(),
        inverted,
        ambiguous,
        outside,
        fraction: if probes.is_empty() {
            0.0
        } else {
            inverted as f64 / probes.len() as f64
        },
    }
}

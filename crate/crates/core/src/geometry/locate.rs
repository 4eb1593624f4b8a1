//! Point location in triangle soups through a uniform bucket grid.
//!
//! The grid does not rely on mesh adjacency, so it also works for image meshes
//! whose triangles may be inverted or overlap.

use nalgebra::Point2;

use super::polygon::BoundingBox;
use super::predicates::orient2d;

/// Result of a successful point location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub triangle: usize,
    /// Barycentric weights, each in `[0, 1]`, summing to 1.
    pub weights: [f64; 3],
}

/// Uniform grid of triangle buckets keyed by triangle bounding boxes.
#[derive(Debug, Clone)]
pub struct TriangleGrid {
    bbox: BoundingBox,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
    tolerance: f64,
}

impl TriangleGrid {
    pub fn new(points: &[Point2<f64>], triangles: &[[usize; 3]]) -> Self {
        let bbox = BoundingBox::from_points(points.iter()).unwrap_or(BoundingBox {
            min: Point2::origin(),
            max: Point2::new(1.0, 1.0),
        });
        let extent = bbox.extent().max(f64::MIN_POSITIVE);
        let tolerance = 1e-12 * extent;
        let target = (triangles.len() as f64).sqrt().max(1.0);
        let cell = (extent / target).max(extent * 1e-6);
        let nx = ((bbox.width() / cell).floor() as usize + 1).min(4096);
        let ny = ((bbox.height() / cell).floor() as usize + 1).min(4096);

        let mut counts = vec![0u32; nx * ny + 1];
        let ranges: Vec<_> = triangles
            .iter()
            .map(|t| {
                let tb = BoundingBox::from_points(t.iter().map(|&i| &points[i])).unwrap();
                (
                    Self::clamp_index(tb.min.x - tolerance, bbox.min.x, cell, nx),
                    Self::clamp_index(tb.max.x + tolerance, bbox.min.x, cell, nx),
                    Self::clamp_index(tb.min.y - tolerance, bbox.min.y, cell, ny),
                    Self::clamp_index(tb.max.y + tolerance, bbox.min.y, cell, ny),
                )
            })
            .collect();
        for &(x0, x1, y0, y1) in &ranges {
            for iy in y0..=y1 {
                for ix in x0..=x1 {
                    counts[iy * nx + ix + 1] += 1;
                }
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; *starts.last().unwrap() as usize];
        for (t, &(x0, x1, y0, y1)) in ranges.iter().enumerate() {
            for iy in y0..=y1 {
                for ix in x0..=x1 {
                    let c = iy * nx + ix;
                    items[fill[c] as usize] = t as u32;
                    fill[c] += 1;
                }
            }
        }
        TriangleGrid {
            bbox,
            cell,
            nx,
            ny,
            starts,
            items,
            tolerance,
        }
    }

    fn clamp_index(v: f64, origin: f64, cell: f64, n: usize) -> usize {
        let i = ((v - origin) / cell).floor();
        if i < 0.0 {
            0
        } else {
            (i as usize).min(n - 1)
        }
    }

    /// Absolute tolerance used by containment tests (1e-12 of the grid extent).
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn bounding_box(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Triangles registered in cell `(ix, iy)`, in increasing index order.
    pub fn cell_items(&self, ix: usize, iy: usize) -> &[u32] {
        let c = iy * self.nx + ix;
        &self.items[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    /// Inclusive cell index range covered by a box.
    pub fn cell_range(&self, b: &BoundingBox) -> (usize, usize, usize, usize) {
        (
            Self::clamp_index(b.min.x - self.tolerance, self.bbox.min.x, self.cell, self.nx),
            Self::clamp_index(b.max.x + self.tolerance, self.bbox.min.x, self.cell, self.nx),
            Self::clamp_index(b.min.y - self.tolerance, self.bbox.min.y, self.cell, self.ny),
            Self::clamp_index(b.max.y + self.tolerance, self.bbox.min.y, self.cell, self.ny),
        )
    }

    /// Candidate triangles whose bounding boxes may contain `q`.
    pub fn candidates(&self, q: &Point2<f64>) -> &[u32] {
        if !self.bbox.contains(q, self.tolerance) {
            return &[];
        }
        let ix = Self::clamp_index(q.x, self.bbox.min.x, self.cell, self.nx);
        let iy = Self::clamp_index(q.y, self.bbox.min.y, self.cell, self.ny);
        self.cell_items(ix, iy)
    }

    /// Lowest-index triangle containing `q` (within tolerance).
    pub fn locate(
        &self,
        points: &[Point2<f64>],
        triangles: &[[usize; 3]],
        q: &Point2<f64>,
    ) -> Option<Location> {
        self.candidates(q).iter().find_map(|&t| {
            let tri = triangle_points(points, &triangles[t as usize]);
            if containment_slack(&tri, q)? >= -self.tolerance {
                barycentric(&tri, q).map(|w| Location {
                    triangle: t as usize,
                    weights: clamp_weights(w),
                })
            } else {
                None
            }
        })
    }

    /// Every triangle containing `q` (within tolerance), in increasing index order.
    pub fn locate_all(
        &self,
        points: &[Point2<f64>],
        triangles: &[[usize; 3]],
        q: &Point2<f64>,
    ) -> Vec<Location> {
        self.candidates(q)
            .iter()
            .filter_map(|&t| {
                let tri = triangle_points(points, &triangles[t as usize]);
                if containment_slack(&tri, q)? >= -self.tolerance {
                    barycentric(&tri, q).map(|w| Location {
                        triangle: t as usize,
                        weights: clamp_weights(w),
                    })
                } else {
                    None
                }
            })
            .collect()
    }
}

#[inline]
pub fn triangle_points(points: &[Point2<f64>], t: &[usize; 3]) -> [Point2<f64>; 3] {
    [points[t[0]], points[t[1]], points[t[2]]]
}

/// Raw barycentric coordinates; `None` for a degenerate triangle.
pub fn barycentric(tri: &[Point2<f64>; 3], q: &Point2<f64>) -> Option<[f64; 3]> {
    let d = orient2d(&tri[0], &tri[1], &tri[2]);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let l0 = orient2d(q, &tri[1], &tri[2]) / d;
    let l1 = orient2d(&tri[0], q, &tri[2]) / d;
    Some([l0, l1, 1.0 - l0 - l1])
}

/// Smallest signed distance from `q` to the three edge lines, positive inside.
/// Works for either orientation; `None` for a degenerate triangle.
pub fn containment_slack(tri: &[Point2<f64>; 3], q: &Point2<f64>) -> Option<f64> {
    let d = orient2d(&tri[0], &tri[1], &tri[2]);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let s = d.signum();
    let mut slack = f64::INFINITY;
    for i in 0..3 {
        let a = tri[(i + 1) % 3];
        let b = tri[(i + 2) % 3];
        let len = (b - a).norm();
        slack = slack.min(s * orient2d(&a, &b, q) / len);
    }
    Some(slack)
}

fn clamp_weights(w: [f64; 3]) -> [f64; 3] {
    let c = w.map(|x| x.clamp(0.0, 1.0));
    let sum: f64 = c.iter().sum();
    c.map(|x| x / sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locates_in_two_triangle_square() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let tris = vec![[0, 1, 2], [0, 2, 3]];
        let grid = TriangleGrid::new(&pts, &tris);
        let loc = grid.locate(&pts, &tris, &Point2::new(0.25, 0.75)).unwrap();
        assert_eq!(loc.triangle, 1);
        // on the shared diagonal both contain it; lowest index wins
        let loc = grid.locate(&pts, &tris, &Point2::new(0.5, 0.5)).unwrap();
        assert_eq!(loc.triangle, 0);
        assert_eq!(grid.locate_all(&pts, &tris, &Point2::new(0.5, 0.5)).len(), 2);
        assert!(grid.locate(&pts, &tris, &Point2::new(2.0, 2.0)).is_none());
        assert!(grid.locate(&pts, &tris, &Point2::new(1.0 + 1e-6, 0.5)).is_none());
    }

    #[test]
    fn inverted_triangles_are_located() {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 0.0)];
        let tris = vec![[0, 1, 2]];
        let grid = TriangleGrid::new(&pts, &tris);
        let loc = grid.locate(&pts, &tris, &Point2::new(0.2, 0.2)).unwrap();
        let w = loc.weights;
        let x = w[0] * pts[0].x + w[1] * pts[1].x + w[2] * pts[2].x;
        let y = w[0] * pts[0].y + w[1] * pts[1].y + w[2] * pts[2].y;
        assert!((x - 0.2).abs() < 1e-15 && (y - 0.2).abs() < 1e-15);
    }
}

use std::sync::Arc;

use nalgebra::{Matrix2, Point2};

use super::MapError;
use crate::geometry::{barycentric, orient2d, TriMesh, TriangleGrid};

/// A map that is affine on every triangle of a source mesh, stored as the
/// images of the mesh nodes.
#[derive(Debug, Clone)]
pub struct PiecewiseAffineMap {
    source: Arc<TriMesh>,
    image: Vec<Point2<f64>>,
    image_grid: TriangleGrid,
    merge_tolerance: f64,
    degenerate_area: f64,
}

impl PiecewiseAffineMap {
    pub fn new(source: Arc<TriMesh>, image: Vec<Point2<f64>>) -> Self {
        assert_eq!(image.len(), source.node_count(), "one image point per node");
        let image_grid = TriangleGrid::new(&image, source.triangles());
        let extent = source.locator().bounding_box().extent();
        let image_extent = image_grid.bounding_box().extent();
        PiecewiseAffineMap {
            merge_tolerance: 1e-8 * extent,
            degenerate_area: 1e-12 * image_extent * image_extent,
            source,
            image,
            image_grid,
        }
    }

    pub fn source_mesh(&self) -> &TriMesh {
        &self.source
    }

    pub fn shared_source(&self) -> Arc<TriMesh> {
        Arc::clone(&self.source)
    }

    pub fn image_nodes(&self) -> &[Point2<f64>] {
        &self.image
    }

    pub fn image_grid(&self) -> &TriangleGrid {
        &self.image_grid
    }

    pub fn image_triangle(&self, t: usize) -> [Point2<f64>; 3] {
        let [a, b, c] = self.source.triangles()[t];
        [self.image[a], self.image[b], self.image[c]]
    }

    /// Signed area of the image of triangle `t`.
    pub fn image_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.image_triangle(t);
        0.5 * orient2d(&a, &b, &c)
    }

    pub fn eval(&self, q: &Point2<f64>) -> Result<Point2<f64>, MapError> {
        let loc = self.source.locate(q).ok_or(MapError::OutsideDomain { x: q.x, y: q.y })?;
        let t = self.source.triangles()[loc.triangle];
        Ok(Point2::from(
            self.image[t[0]].coords * loc.weights[0]
                + self.image[t[1]].coords * loc.weights[1]
                + self.image[t[2]].coords * loc.weights[2],
        ))
    }

    /// Constant Jacobian of the affine piece on triangle `t`.
    pub fn jacobian(&self, t: usize) -> Matrix2<f64> {
        let [p0, p1, p2] = self.source.triangle_points(t);
        let [q0, q1, q2] = self.image_triangle(t);
        let src = Matrix2::from_columns(&[p1 - p0, p2 - p0]);
        let img = Matrix2::from_columns(&[q1 - q0, q2 - q0]);
        img * src.try_inverse().expect("source triangles are non-degenerate")
    }

    pub fn det(&self, t: usize) -> f64 {
        self.jacobian(t).determinant()
    }

    /// Determinant of the piece containing `q`, if `q` is in the domain.
    pub fn det_at(&self, q: &Point2<f64>) -> Option<f64> {
        self.source.locate(q).map(|loc| self.det(loc.triangle))
    }

    /// Every distinct preimage of `w`, ordered by the lowest triangle index
    /// that produced it.
    pub fn preimages(&self, w: &Point2<f64>) -> Vec<Point2<f64>> {
        let mut found: Vec<Point2<f64>> = Vec::new();
        for loc in self.image_grid.locate_all(&self.image, self.source.triangles(), w) {
            if self.image_area(loc.triangle).abs() <= self.degenerate_area {
                continue;
            }
            let tri = self.image_triangle(loc.triangle);
            let Some(weights) = barycentric(&tri, w) else { continue };
            let weights = loc_weights(weights);
            let [p0, p1, p2] = self.source.triangle_points(loc.triangle);
            let p = Point2::from(p0.coords * weights[0] + p1.coords * weights[1] + p2.coords * weights[2]);
            if !found.iter().any(|f| (f - p).norm() <= self.merge_tolerance) {
                found.push(p);
            }
        }
        found
    }

    /// The unique preimage of `w`; overlapping image triangles yield
    /// [`MapError::Ambiguous`] carrying the lowest-index candidate.
    pub fn invert(&self, w: &Point2<f64>) -> Result<Point2<f64>, MapError> {
        let pre = self.preimages(w);
        match pre.len() {
            0 => Err(MapError::OutsideImage { x: w.x, y: w.y }),
            1 => Ok(pre[0]),
            m => Err(MapError::Ambiguous {
                x: w.x,
                y: w.y,
                preimage: [pre[0].x, pre[0].y],
                multiplicity: m,
            }),
        }
    }
}

/// Barycentric weights pulled into the closed simplex; points located within
/// tolerance of an edge may come out a hair negative.
fn loc_weights(w: [f64; 3]) -> [f64; 3] {
    let c = w.map(|x| x.clamp(0.0, 1.0));
    let s: f64 = c.iter().sum();
    c.map(|x| x / s)
}

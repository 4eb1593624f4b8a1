use std::sync::Arc;

use nalgebra::{Matrix2, Point2};

use super::{MapError, PiecewiseAffineMap};
use crate::gbc::GbcBasis;
use crate::geometry::{validate_polygon, BoundaryCorrespondence, Polygon};

/// `F(x) = sum_i phi_i(x) w_i` for a harmonic basis and target points `w_i`.
#[derive(Debug, Clone)]
pub struct HarmonicMap {
    basis: Arc<GbcBasis>,
    targets: Vec<Point2<f64>>,
    target: Option<Polygon>,
    affine: PiecewiseAffineMap,
}

/// Builds the map whose boundary follows the correspondence.
pub fn build_map(basis: Arc<GbcBasis>, correspondence: &BoundaryCorrespondence) -> Result<HarmonicMap, MapError> {
    let source = correspondence.source();
    if source.vertices() != basis.polygon().vertices() || source.loop_count() != basis.polygon().loop_count() {
        return Err(MapError::SourceMismatch);
    }
    let targets = correspondence.targets();
    HarmonicMap::assemble(basis, targets, Some(correspondence.target().clone()))
}

impl HarmonicMap {
    /// Builds the map from raw target points in basis order, without checking
    /// that they form a valid correspondence. The target region is recovered
    /// from the points when they form a valid polygon.
    pub fn from_targets(basis: Arc<GbcBasis>, targets: Vec<Point2<f64>>) -> Result<Self, MapError> {
        let polygon = basis.polygon();
        let offsets = polygon.loop_offsets();
        let target = (targets.len() == basis.len())
            .then(|| {
                let loops: Vec<Vec<Point2<f64>>> = (0..polygon.loop_count())
                    .map(|l| targets[offsets[l]..offsets[l] + polygon.loop_points(l).len()].to_vec())
                    .collect();
                validate_polygon(&loops[0], &loops[1..]).ok()
            })
            .flatten();
        Self::assemble(basis, targets, target)
    }

    fn assemble(basis: Arc<GbcBasis>, targets: Vec<Point2<f64>>, target: Option<Polygon>) -> Result<Self, MapError> {
        if targets.len() != basis.len() {
            return Err(MapError::CountMismatch {
                expected: basis.len(),
                got: targets.len(),
            });
        }
        let mesh = basis.shared_mesh();
        let image = (0..mesh.node_count())
            .map(|node| {
                let mut p = nalgebra::Vector2::zeros();
                for (f, w) in basis.functions().iter().zip(&targets) {
                    p += w.coords * f.values()[node];
                }
                Point2::from(p)
            })
            .collect();
        let affine = PiecewiseAffineMap::new(mesh, image);
        Ok(HarmonicMap {
            basis,
            targets,
            target,
            affine,
        })
    }

    pub fn basis(&self) -> &GbcBasis {
        &self.basis
    }

    pub fn source(&self) -> &Polygon {
        self.basis.polygon()
    }

    /// Target points `w_i` in basis order.
    pub fn targets(&self) -> &[Point2<f64>] {
        &self.targets
    }

    /// Target region, when the targets form a valid polygon.
    pub fn target_polygon(&self) -> Option<&Polygon> {
        self.target.as_ref()
    }

    pub fn affine(&self) -> &PiecewiseAffineMap {
        &self.affine
    }

    pub fn image_nodes(&self) -> &[Point2<f64>] {
        self.affine.image_nodes()
    }

    pub fn eval(&self, q: &Point2<f64>) -> Result<Point2<f64>, MapError> {
        self.affine.eval(q)
    }

    pub fn jacobian(&self, triangle: usize) -> Matrix2<f64> {
        self.affine.jacobian(triangle)
    }

    pub fn invert(&self, w: &Point2<f64>) -> Result<Point2<f64>, MapError> {
        self.affine.invert(w)
    }

    /// Image mesh dump: `{"nodes": ..., "triangles": ..., "image": ...}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = self.basis.mesh().to_json_value();
        v["image"] = serde_json::Value::from(
            self.image_nodes()
                .iter()
                .map(|p| vec![p.x, p.y])
                .collect::<Vec<_>>(),
        );
        v
    }
}

use nalgebra::Point2;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::TriMesh;
use crate::mapping::{AnalyticMap, HarmonicMap, PiecewiseAffineMap};

/// Halton points are taken from this index on; the first few are clustered
/// near the origin of the box.
const HALTON_SKIP: u64 = 20;

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// First `n` points of the 2-3 Halton sequence over the mesh bounding box
/// that fall inside the mesh.
pub fn interior_samples(mesh: &TriMesh, n: usize) -> Vec<Point2<f64>> {
    let bb = mesh.locator().bounding_box();
    let mut out = Vec::with_capacity(n);
    let mut i = HALTON_SKIP;
    // Guard against meshes with a tiny fill ratio of their bounding box.
    let limit = HALTON_SKIP + 1000 * n as u64 + 1000;
    while out.len() < n && i < limit {
        let p = Point2::new(
            bb.min.x + bb.width() * halton(i, 2),
            bb.min.y + bb.height() * halton(i, 3),
        );
        if mesh.locate(&p).is_some() {
            out.push(p);
        }
        i += 1;
    }
    out
}

/// Anything that can report a Jacobian determinant over a meshed domain.
pub trait DetSource: Sync {
    fn sample_mesh(&self) -> &TriMesh;
    fn det_at(&self, p: &Point2<f64>) -> Option<f64>;
}

impl DetSource for PiecewiseAffineMap {
    fn sample_mesh(&self) -> &TriMesh {
        self.source_mesh()
    }

    fn det_at(&self, p: &Point2<f64>) -> Option<f64> {
        self.source_mesh().locate(p).map(|loc| self.det(loc.triangle))
    }
}

impl DetSource for HarmonicMap {
    fn sample_mesh(&self) -> &TriMesh {
        self.affine().source_mesh()
    }

    fn det_at(&self, p: &Point2<f64>) -> Option<f64> {
        self.affine().det_at(p)
    }
}

/// Closed-form map sampled through central differences; the mesh only
/// supplies the sampling domain.
pub struct FiniteDifferenceDets<'a> {
    pub map: &'a AnalyticMap,
    pub mesh: TriMesh,
    pub step: f64,
}

impl<'a> FiniteDifferenceDets<'a> {
    pub fn new(map: &'a AnalyticMap, step: f64) -> Self {
        FiniteDifferenceDets {
            map,
            mesh: TriMesh::rectangle(map.min, map.max, 1, 1),
            step,
        }
    }
}

impl DetSource for FiniteDifferenceDets<'_> {
    fn sample_mesh(&self) -> &TriMesh {
        &self.mesh
    }

    fn det_at(&self, p: &Point2<f64>) -> Option<f64> {
        self.map.contains(p).then(|| self.map.fd_jacobian(p, self.step).determinant())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetSample {
    pub x: f64,
    pub y: f64,
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianSampling {
    pub sample_count: usize,
    pub min_det: f64,
    pub max_det: f64,
    pub threshold: f64,
    pub below_threshold: Vec<DetSample>,
}

/// Determinants at `n` deterministic low-discrepancy interior points.
pub fn sample_jacobian_determinants<M: DetSource + ?Sized>(map: &M, n: usize, threshold: f64) -> JacobianSampling {
    let points = interior_samples(map.sample_mesh(), n);
    let dets: Vec<f64> = points
        .par_iter()
        .map(|p| map.det_at(p).unwrap_or(f64::NAN))
        .collect();
    let below_threshold = points
        .iter()
        .zip(&dets)
        .filter(|(_, &d)| d < threshold)
        .map(|(p, &det)| DetSample { x: p.x, y: p.y, det })
        .collect();
    JacobianSampling {
        sample_count: points.len(),
        min_det: dets.iter().copied().fold(f64::INFINITY, f64::min),
        max_det: dets.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        threshold,
        below_threshold,
    }
}

use std::sync::Arc;

use nalgebra::Point2;

use super::{HarmonicMap, MapError};

/// `Phi1^{-1} o Phi0` for two harmonic maps onto the same intermediate polygon.
#[derive(Debug, Clone)]
pub struct ComposedMap {
    phi0: Arc<HarmonicMap>,
    phi1: Arc<HarmonicMap>,
}

/// Composes `phi0: V -> Theta` with the inverse of `phi1: W -> Theta`.
pub fn compose_maps(phi0: Arc<HarmonicMap>, phi1: Arc<HarmonicMap>) -> Result<ComposedMap, MapError> {
    let (Some(t0), Some(t1)) = (phi0.target_polygon(), phi1.target_polygon()) else {
        return Err(MapError::IntermediateMismatch(
            "both maps need a valid intermediate polygon".into(),
        ));
    };
    let tol = 1e-12 * t0.bounding_box().extent();
    let close = |a: &[Point2<f64>], b: &[Point2<f64>], r: usize| {
        (0..a.len()).all(|k| (a[(k + r) % a.len()] - b[k]).norm() <= tol)
    };
    let (a, b) = (t0.outer(), t1.outer());
    if t0.loop_count() != t1.loop_count() || a.len() != b.len() {
        return Err(MapError::IntermediateMismatch(format!(
            "intermediate polygons have {} and {} vertices",
            t0.vertex_count(),
            t1.vertex_count()
        )));
    }
    // Pairing offsets may rotate the outer loop; holes must agree as stored.
    if !(0..a.len()).any(|r| close(a, b, r)) {
        return Err(MapError::IntermediateMismatch(
            "outer loops of the intermediate polygons differ".into(),
        ));
    }
    for (h0, h1) in t0.holes().iter().zip(t1.holes()) {
        if h0.len() != h1.len() || !close(h0, h1, 0) {
            return Err(MapError::IntermediateMismatch("intermediate holes differ".into()));
        }
    }
    Ok(ComposedMap { phi0, phi1 })
}

impl ComposedMap {
    pub fn first(&self) -> &HarmonicMap {
        &self.phi0
    }

    pub fn second(&self) -> &HarmonicMap {
        &self.phi1
    }

    /// Forward evaluation `V -> W`.
    pub fn eval(&self, q: &Point2<f64>) -> Result<Point2<f64>, MapError> {
        self.phi1.invert(&self.phi0.eval(q)?)
    }

    /// Inverse evaluation `W -> V`, used for pull-back warping.
    pub fn pullback(&self, w: &Point2<f64>) -> Result<Point2<f64>, MapError> {
        self.phi0.invert(&self.phi1.eval(w)?)
    }
}

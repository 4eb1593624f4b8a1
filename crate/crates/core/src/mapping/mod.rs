//! Harmonic maps between polygons: evaluation, Jacobians, inversion and
//! composition through an intermediate polygon.

mod affine;
mod analytic;
mod compose;
mod harmonic;

pub use affine::PiecewiseAffineMap;
pub use analytic::AnalyticMap;
pub use compose::{compose_maps, ComposedMap};
pub use harmonic::{build_map, HarmonicMap};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("point ({x}, {y}) is outside the source domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("point ({x}, {y}) is outside the image")]
    OutsideImage { x: f64, y: f64 },
    #[error("point ({x}, {y}) has {multiplicity} preimages; the map is not injective there")]
    Ambiguous {
        x: f64,
        y: f64,
        /// Preimage from the lowest-index image triangle.
        preimage: [f64; 2],
        multiplicity: usize,
    },
    #[error("expected {expected} target points, got {got}")]
    CountMismatch { expected: usize, got: usize },
    #[error("correspondence source differs from the basis polygon")]
    SourceMismatch,
    #[error("intermediate polygons differ: {0}")]
    IntermediateMismatch(String),
}

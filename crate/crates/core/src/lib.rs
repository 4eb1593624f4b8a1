//! Harmonic generalized barycentric coordinates on polygons.
//!
//! The crate computes one discrete harmonic function per boundary vertex with
//! P1 finite elements, builds the induced piecewise-affine maps between
//! polygons, inverts and composes them, checks them for bijectivity and uses
//! them to warp raster images.
//!
//! ```
//! use std::sync::Arc;
//! use harmonic_gbc::{boundary_correspondence, build_map, compute_gbc, Polygon};
//!
//! let l = Polygon::new(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]).unwrap();
//! let square = Polygon::new(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [1.0, 1.0], [0.5, 1.0], [0.0, 1.0]]).unwrap();
//! let basis = Arc::new(compute_gbc(&l, 1.0 / 16.0).unwrap());
//! let map = build_map(basis, &boundary_correspondence(&l, &square).unwrap()).unwrap();
//! let w = map.eval(&nalgebra::Point2::new(0.5, 0.5)).unwrap();
//! assert!(square.contains(&w));
//! ```

// `!(x > t)` comparisons are deliberate so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod gbc;
pub mod geometry;
pub mod mapping;
pub mod solver;
pub mod verifier;
pub mod warp;

pub use gbc::{compute_gbc, compute_gbc_with_holes, GbcBasis, GbcError};
pub use geometry::{
    boundary_correspondence, insert_inactive_vertices, triangulate, BoundaryCorrespondence, GeometryError, Polygon,
    TriMesh,
};
pub use mapping::{build_map, compose_maps, AnalyticMap, ComposedMap, HarmonicMap, MapError};
pub use solver::SolverError;
pub use verifier::{certify, BijectivityReport, Verdict, VerifierConfig};
pub use warp::{warp_image, RasterImage, WarpError, WarpJob};

//! Polygons, triangulation, boundary correspondence and point location.

mod correspondence;
mod locate;
mod mesh;
mod polygon;
mod predicates;

pub use correspondence::{boundary_correspondence, BoundaryCorrespondence};
pub use locate::{barycentric, containment_slack, triangle_points, Location, TriangleGrid};
pub use mesh::{loop_area, triangulate, BoundaryLocation, TriMesh, MIN_ANGLE_DEG, REFLEX_REFINEMENT};
pub use polygon::{
    insert_inactive_vertices, point_in_loop, signed_area, validate_polygon, BoundingBox, Polygon,
    PolygonJson, GEOMETRY_TOLERANCE,
};
pub use predicates::{orient2d, segments_intersect, triangle_penetration};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("loop {loop_index} has fewer than 3 vertices")]
    TooFewVertices { loop_index: usize },
    #[error("loop {loop_index} contains a non-finite coordinate")]
    NonFinite { loop_index: usize },
    #[error("loop {loop_index} repeats vertex {vertex}")]
    DuplicateVertex { loop_index: usize, vertex: usize },
    #[error("loop {loop_index} has zero area")]
    ZeroArea { loop_index: usize },
    #[error("loop {loop_index}: edges {} and {} intersect", edges.0, edges.1)]
    SelfIntersection { loop_index: usize, edges: (usize, usize) },
    #[error("hole {hole} is not strictly inside the outer loop")]
    HoleOutsideOuter { hole: usize },
    #[error("inactive vertex parameter {t} on edge {edge} is not strictly inside (0, 1)")]
    ParameterOutOfRange { edge: usize, t: f64 },
    #[error("loop {loop_index}: source has {source_count} vertices, target has {target_count}")]
    CountMismatch {
        loop_index: usize,
        source_count: usize,
        target_count: usize,
    },
    #[error("mesh size must be positive and finite, got {0}")]
    InvalidMeshSize(f64),
    #[error("meshing failed: {0}")]
    MeshingFailure(String),
    #[error("malformed polygon input: {0}")]
    Parse(String),
}

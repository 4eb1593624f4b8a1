//! Harmonic generalized barycentric coordinates.
//!
//! Each coordinate function solves the Laplace equation with piecewise-linear
//! hat data on its own loop and zero on every other loop. All solves share
//! one mesh and one factorization.

use std::sync::Arc;

use nalgebra::Point2;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{triangulate, BoundaryLocation, GeometryError, Polygon, TriMesh};
use crate::solver::{assemble_stiffness, DirichletSolver, LinearSolver, NodalField, SolverError};

/// Values below this are treated as a failed basis rather than round-off.
pub const NONNEGATIVITY_TOLERANCE: f64 = -1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GbcError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("function {function} takes value {value:e} at node {node}")]
    Negative { function: usize, node: usize, value: f64 },
    #[error("polygon has holes; use compute_gbc_with_holes")]
    HolesPresent,
    #[error("polygon has no holes")]
    NoHoles,
    #[error("point ({x}, {y}) is outside the domain")]
    OutsideDomain { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Plain,
    WithHoles,
}

/// One discrete harmonic function per polygon vertex, outer loop first, then
/// each hole in its stored order.
#[derive(Debug, Clone)]
pub struct GbcBasis {
    polygon: Polygon,
    mesh: Arc<TriMesh>,
    functions: Vec<NodalField>,
    kind: BasisKind,
}

/// Worst-case deviations from the coordinate axioms over all mesh nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomReport {
    /// `max |sum_i phi_i - 1|`.
    pub partition_of_unity: f64,
    /// `max |sum_i phi_i v_i - x|` divided by the polygon diameter.
    pub linear_precision: f64,
    pub min_value: f64,
    /// `phi_i(v_j) == delta_ij` bit for bit.
    pub lagrange_exact: bool,
    /// Boundary values equal the hat data bit for bit.
    pub boundary_exact: bool,
}

/// Hat data of function `(loop_index, vertex)` at a boundary location.
pub fn hat_value(tag: &BoundaryLocation, loop_index: usize, vertex: usize, loop_len: usize) -> f64 {
    match *tag {
        BoundaryLocation::Vertex { loop_index: l, vertex: v } => {
            if l == loop_index && v == vertex {
                1.0
            } else {
                0.0
            }
        }
        BoundaryLocation::Edge { loop_index: l, edge, t } => {
            if l != loop_index {
                0.0
            } else if edge == vertex {
                1.0 - t
            } else if (edge + 1) % loop_len == vertex {
                t
            } else {
                0.0
            }
        }
    }
}

/// Harmonic coordinates of a polygon without holes.
pub fn compute_gbc(polygon: &Polygon, h: f64) -> Result<GbcBasis, GbcError> {
    if polygon.has_holes() {
        return Err(GbcError::HolesPresent);
    }
    compute_basis(polygon, h, LinearSolver::default())
}

/// Harmonic coordinates of a polygon with at least one hole.
pub fn compute_gbc_with_holes(polygon: &Polygon, h: f64) -> Result<GbcBasis, GbcError> {
    if !polygon.has_holes() {
        return Err(GbcError::NoHoles);
    }
    compute_basis(polygon, h, LinearSolver::default())
}

/// Meshes `polygon` at size `h` and computes its basis with the chosen solver.
pub fn compute_basis(polygon: &Polygon, h: f64, method: LinearSolver) -> Result<GbcBasis, GbcError> {
    let mesh = triangulate(polygon, h)?;
    GbcBasis::from_mesh(polygon, mesh, method)
}

impl GbcBasis {
    /// Computes the basis on a mesh produced by [`triangulate`] for `polygon`.
    pub fn from_mesh(polygon: &Polygon, mesh: TriMesh, method: LinearSolver) -> Result<Self, GbcError> {
        let system = assemble_stiffness(&mesh)?;
        let solver = DirichletSolver::new(&system, method)?;
        let jobs: Vec<(usize, usize)> = (0..polygon.loop_count())
            .flat_map(|l| (0..polygon.loop_points(l).len()).map(move |k| (l, k)))
            .collect();
        let functions = jobs
            .par_iter()
            .map(|&(l, k)| {
                let n = polygon.loop_points(l).len();
                let data: Vec<f64> = mesh
                    .boundary_tags()
                    .iter()
                    .map(|tag| tag.as_ref().map_or(0.0, |t| hat_value(t, l, k, n)))
                    .collect();
                solver.solve_full(&data)
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (i, f) in functions.iter().enumerate() {
            if let Some((node, &value)) = f
                .values()
                .iter()
                .enumerate()
                .find(|(_, &v)| v < NONNEGATIVITY_TOLERANCE)
            {
                return Err(GbcError::Negative { function: i, node, value });
            }
        }
        Ok(GbcBasis {
            polygon: polygon.clone(),
            mesh: Arc::new(mesh),
            functions,
            kind: if polygon.has_holes() {
                BasisKind::WithHoles
            } else {
                BasisKind::Plain
            },
        })
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn shared_mesh(&self) -> Arc<TriMesh> {
        Arc::clone(&self.mesh)
    }

    pub fn functions(&self) -> &[NodalField] {
        &self.functions
    }

    pub fn function(&self, i: usize) -> &NodalField {
        &self.functions[i]
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// All weights at mesh node `node`.
    pub fn node_weights(&self, node: usize) -> Vec<f64> {
        self.functions.iter().map(|f| f.values()[node]).collect()
    }

    /// Interpolated weights at an arbitrary point of the domain.
    pub fn evaluate(&self, q: &Point2<f64>) -> Result<Vec<f64>, GbcError> {
        let loc = self
            .mesh
            .locate(q)
            .ok_or(GbcError::OutsideDomain { x: q.x, y: q.y })?;
        Ok(self.functions.iter().map(|f| f.interpolate(&self.mesh, &loc)).collect())
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let vertices = self.polygon.vertices();
        let diameter = self.polygon.diameter();
        let mut pu: f64 = 0.0;
        let mut lp: f64 = 0.0;
        let mut min_value = f64::INFINITY;
        for (node, x) in self.mesh.nodes().iter().enumerate() {
            let mut sum = 0.0;
            let mut rep = nalgebra::Vector2::zeros();
            for (i, f) in self.functions.iter().enumerate() {
                let v = f.values()[node];
                sum += v;
                rep += vertices[i].coords * v;
                min_value = min_value.min(v);
            }
            pu = pu.max((sum - 1.0).abs());
            lp = lp.max((rep - x.coords).norm() / diameter);
        }
        let lagrange_exact = self.mesh.vertex_nodes().iter().enumerate().all(|(j, &node)| {
            self.functions
                .iter()
                .enumerate()
                .all(|(i, f)| f.values()[node] == if i == j { 1.0 } else { 0.0 })
        });
        let offsets = self.polygon.loop_offsets();
        let boundary_exact = self.mesh.boundary_tags().iter().enumerate().all(|(node, tag)| {
            let Some(tag) = tag else { return true };
            (0..self.polygon.loop_count()).all(|l| {
                let n = self.polygon.loop_points(l).len();
                (0..n).all(|k| self.functions[offsets[l] + k].values()[node] == hat_value(tag, l, k, n))
            })
        });
        AxiomReport {
            partition_of_unity: pu,
            linear_precision: lp,
            min_value,
            lagrange_exact,
            boundary_exact,
        }
    }

    /// Nodal dump: `{"nodes": [[x,y],...], "triangles": [[i,j,k],...], "phi": [[...],...]}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = self.mesh.to_json_value();
        v["phi"] = serde_json::Value::from(
            self.functions
                .iter()
                .map(|f| f.values().to_vec())
                .collect::<Vec<_>>(),
        );
        v
    }
}

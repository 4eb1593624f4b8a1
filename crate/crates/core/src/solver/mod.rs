//! P1 finite-element Laplace solves with Dirichlet data.

mod assembly;
mod cg;

use std::collections::BTreeMap;

use sprs::CsMat;
use sprs_ldl::{Ldl, LdlNumeric};
use thiserror::Error;

pub use assembly::{assemble_stiffness, element_stiffness, StiffnessSystem};
pub use cg::jacobi_pcg;

use crate::geometry::{Location, TriMesh};

/// Relative residual required of every reduced solve.
pub const RELATIVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("triangle {triangle} is degenerate (area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error("solver stalled at relative residual {residual:e} after {iterations} iterations")]
    Divergence { residual: f64, iterations: usize },
    #[error("boundary data must cover exactly the {expected} Dirichlet nodes (missing or extra node {node})")]
    BoundaryDataMismatch { expected: usize, node: usize },
    #[error("factorization failed: {0}")]
    Factorization(String),
}

/// One scalar per mesh node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    values: Vec<f64>,
}

impl NodalField {
    pub fn new(values: Vec<f64>) -> Self {
        NodalField { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Piecewise-linear interpolant at a located point.
    pub fn interpolate(&self, mesh: &TriMesh, loc: &Location) -> f64 {
        let t = mesh.triangles()[loc.triangle];
        (0..3).map(|k| loc.weights[k] * self.values[t[k]]).sum()
    }
}

/// Linear solver used for the reduced interior system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolver {
    /// Sparse LDL^T with reverse Cuthill-McKee ordering, factored once.
    #[default]
    Cholesky,
    /// Conjugate gradients with diagonal preconditioning.
    JacobiCg,
}

#[allow(clippy::large_enum_variant)]
enum Backend {
    Ldl(LdlNumeric<f64, usize>),
    Cg { inv_diag: Vec<f64> },
}

/// Reduced interior system of a [`StiffnessSystem`], prepared for repeated
/// solves with different boundary data. Solving only borrows `self`, so one
/// instance can serve concurrent solves.
pub struct DirichletSolver<'a> {
    system: &'a StiffnessSystem,
    free: Vec<usize>,
    free_pos: Vec<usize>,
    reduced: CsMat<f64>,
    backend: Backend,
}

impl<'a> DirichletSolver<'a> {
    pub fn new(system: &'a StiffnessSystem, method: LinearSolver) -> Result<Self, SolverError> {
        let n = system.size();
        let free: Vec<usize> = (0..n).filter(|&i| !system.is_dirichlet(i)).collect();
        let mut free_pos = vec![usize::MAX; n];
        for (k, &i) in free.iter().enumerate() {
            free_pos[i] = k;
        }
        let mut indptr = vec![0usize];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for &i in &free {
            let row = system.matrix().outer_view(i).expect("row in range");
            for (j, &v) in row.iter() {
                if free_pos[j] != usize::MAX {
                    indices.push(free_pos[j]);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        let m = free.len();
        let reduced = CsMat::new((m, m), indptr, indices, data);
        let backend = match method {
            LinearSolver::Cholesky => {
                let ldl = Ldl::new()
                    .fill_in_reduction(sprs::FillInReduction::ReverseCuthillMcKee)
                    .check_symmetry(sprs::SymmetryCheck::DontCheckSymmetry)
                    .numeric(reduced.view())
                    .map_err(|e| SolverError::Factorization(e.to_string()))?;
                if let Some(k) = ldl.d().iter().position(|&d| !(d > 0.0)) {
                    return Err(SolverError::Factorization(format!(
                        "reduced matrix is not positive definite (pivot {k})"
                    )));
                }
                Backend::Ldl(ldl)
            }
            LinearSolver::JacobiCg => {
                let inv_diag = (0..m)
                    .map(|k| 1.0 / reduced.get(k, k).copied().unwrap_or(1.0))
                    .collect();
                Backend::Cg { inv_diag }
            }
        };
        Ok(DirichletSolver {
            system,
            free,
            free_pos,
            reduced,
            backend,
        })
    }

    pub fn interior_count(&self) -> usize {
        self.free.len()
    }

    /// Solves with boundary data taken from `full[d]` for each Dirichlet node
    /// `d`; other entries of `full` are ignored.
    pub fn solve_full(&self, full: &[f64]) -> Result<NodalField, SolverError> {
        assert_eq!(full.len(), self.system.size(), "one value per node");
        let mut rhs = vec![0.0; self.free.len()];
        for (k, &i) in self.free.iter().enumerate() {
            let row = self.system.matrix().outer_view(i).expect("row in range");
            rhs[k] = -row
                .iter()
                .filter(|(j, _)| self.free_pos[*j] == usize::MAX)
                .map(|(j, &v)| v * full[j])
                .sum::<f64>();
        }
        let x = self.solve_reduced(&rhs)?;
        let mut values = full.to_vec();
        for (k, &i) in self.free.iter().enumerate() {
            values[i] = x[k];
        }
        Ok(NodalField { values })
    }

    /// Solves with boundary data given as a map over exactly the Dirichlet nodes.
    pub fn solve(&self, boundary_values: &BTreeMap<usize, f64>) -> Result<NodalField, SolverError> {
        let expected = self.system.dirichlet_nodes();
        if boundary_values.len() != expected.len() {
            let node = expected
                .iter()
                .copied()
                .find(|d| !boundary_values.contains_key(d))
                .or_else(|| boundary_values.keys().copied().find(|k| !self.system.is_dirichlet(*k)))
                .unwrap_or(0);
            return Err(SolverError::BoundaryDataMismatch {
                expected: expected.len(),
                node,
            });
        }
        let mut full = vec![0.0; self.system.size()];
        for (&node, &v) in boundary_values {
            if node >= full.len() || !self.system.is_dirichlet(node) {
                return Err(SolverError::BoundaryDataMismatch {
                    expected: expected.len(),
                    node,
                });
            }
            full[node] = v;
        }
        self.solve_full(&full)
    }

    fn solve_reduced(&self, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
        let bnorm = norm(rhs);
        if bnorm == 0.0 {
            return Ok(vec![0.0; rhs.len()]);
        }
        match &self.backend {
            Backend::Ldl(ldl) => {
                let mut x: Vec<f64> = ldl.solve(rhs);
                let mut residual = relative_residual(&self.reduced, &x, rhs, bnorm);
                // A couple of refinement sweeps absorb round-off on badly graded meshes.
                for _ in 0..3 {
                    if residual <= RELATIVE_TOLERANCE {
                        break;
                    }
                    let r = residual_vector(&self.reduced, &x, rhs);
                    let dx: Vec<f64> = ldl.solve(&r[..]);
                    x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
                    residual = relative_residual(&self.reduced, &x, rhs, bnorm);
                }
                if residual > RELATIVE_TOLERANCE {
                    return Err(SolverError::Divergence { residual, iterations: 0 });
                }
                Ok(x)
            }
            Backend::Cg { inv_diag } => {
                let cap = (20.0 * (rhs.len() as f64).sqrt()).ceil() as usize;
                jacobi_pcg(&self.reduced, inv_diag, rhs, RELATIVE_TOLERANCE, cap.max(1))
            }
        }
    }
}

/// Convenience wrapper: one factorization, one solve.
pub fn solve_dirichlet(
    system: &StiffnessSystem,
    boundary_values: &BTreeMap<usize, f64>,
) -> Result<NodalField, SolverError> {
    DirichletSolver::new(system, LinearSolver::default())?.solve(boundary_values)
}

pub(crate) fn spmv(a: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    a.outer_iterator()
        .map(|row| row.iter().map(|(j, &v)| v * x[j]).sum())
        .collect()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn residual_vector(a: &CsMat<f64>, x: &[f64], b: &[f64]) -> Vec<f64> {
    spmv(a, x).iter().zip(b).map(|(ax, bi)| bi - ax).collect()
}

fn relative_residual(a: &CsMat<f64>, x: &[f64], b: &[f64], bnorm: f64) -> f64 {
    norm(&residual_vector(a, x, b)) / bnorm
}

use std::io::{self, Write};

use sprs::CsMat;

use super::SolverError;
use crate::geometry::TriMesh;

/// Element stiffness of the linear hat functions on one triangle.
///
/// Off-diagonals are `(b_i b_j + c_i c_j) / (4A)` with `b, c` the rotated
/// opposite edges; diagonals are set to minus the off-diagonal row sum so each
/// element row sums to zero.
#[allow(clippy::needless_range_loop)]
pub fn element_stiffness(p: &[nalgebra::Point2<f64>; 3]) -> [[f64; 3]; 3] {
    let mut b = [0.0; 3];
    let mut c = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        b[i] = p[j].y - p[k].y;
        c[i] = p[k].x - p[j].x;
    }
    let area2 = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[1].y - p[0].y) * (p[2].x - p[0].x);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let v = (b[i] * b[j] + c[i] * c[j]) / (2.0 * area2);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    for i in 0..3 {
        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
        k[i][i] = -(k[i][j] + k[i][l]);
    }
    k
}

/// P1 stiffness matrix of a mesh together with its Dirichlet node set.
#[derive(Debug, Clone)]
pub struct StiffnessSystem {
    matrix: CsMat<f64>,
    dirichlet: Vec<usize>,
    is_dirichlet: Vec<bool>,
}

/// Assembles the global stiffness matrix; all boundary-loop nodes are Dirichlet.
pub fn assemble_stiffness(mesh: &TriMesh) -> Result<StiffnessSystem, SolverError> {
    let n = mesh.node_count();
    let domain_area: f64 = (0..mesh.triangle_count()).map(|t| mesh.triangle_area(t).abs()).sum();
    let mut triplets = Vec::with_capacity(9 * mesh.triangle_count());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        if !(area > 1e-14 * domain_area) {
            return Err(SolverError::DegenerateTriangle { triangle: t, area });
        }
        let k = element_stiffness(&mesh.triangle_points(t));
        for i in 0..3 {
            for j in 0..3 {
                triplets.push((tri[i], tri[j], k[i][j]));
            }
        }
    }
    // Stable sort keeps triangle order within each entry, so (i, j) and (j, i)
    // accumulate identical terms in identical order.
    triplets.sort_by_key(|&(r, c, _)| (r, c));
    let mut indptr = vec![0usize; n + 1];
    let mut indices = Vec::new();
    let mut data: Vec<f64> = Vec::new();
    let mut last: Option<(usize, usize)> = None;
    for (r, c, v) in triplets {
        if last == Some((r, c)) {
            *data.last_mut().unwrap() += v;
        } else {
            indices.push(c);
            data.push(v);
            indptr[r + 1] += 1;
            last = Some((r, c));
        }
    }
    for i in 0..n {
        indptr[i + 1] += indptr[i];
    }
    let matrix = CsMat::new((n, n), indptr, indices, data);

    let mut is_dirichlet = vec![false; n];
    for lp in mesh.boundary_loops() {
        for &v in lp {
            is_dirichlet[v] = true;
        }
    }
    let dirichlet = (0..n).filter(|&i| is_dirichlet[i]).collect();
    Ok(StiffnessSystem {
        matrix,
        dirichlet,
        is_dirichlet,
    })
}

impl StiffnessSystem {
    pub fn matrix(&self) -> &CsMat<f64> {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Sorted Dirichlet node indices.
    pub fn dirichlet_nodes(&self) -> &[usize] {
        &self.dirichlet
    }

    pub fn is_dirichlet(&self, node: usize) -> bool {
        self.is_dirichlet[node]
    }

    /// Replaces the Dirichlet node set.
    pub fn with_dirichlet_nodes(mut self, nodes: &[usize]) -> Self {
        self.is_dirichlet = vec![false; self.size()];
        for &v in nodes {
            self.is_dirichlet[v] = true;
        }
        self.dirichlet = (0..self.size()).filter(|&i| self.is_dirichlet[i]).collect();
        self
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j).copied().unwrap_or(0.0)
    }

    /// `y = K x` on the full (unconstrained) matrix.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .outer_iterator()
            .map(|row| row.iter().map(|(j, &v)| v * x[j]).sum())
            .collect()
    }

    /// Dirichlet energy `x^T K x` (twice the integral of `|grad u|^2 / 2`).
    pub fn energy(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Coordinate-format dump, one `row col value` triple per line.
    pub fn write_coo<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {} {}", self.size(), self.size(), self.matrix.nnz())?;
        for (i, row) in self.matrix.outer_iterator().enumerate() {
            for (j, v) in row.iter() {
                writeln!(out, "{i} {j} {v:e}")?;
            }
        }
        Ok(())
    }
}

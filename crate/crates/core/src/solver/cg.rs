use sprs::CsMat;

use super::{norm, spmv, SolverError};

/// Preconditioned conjugate gradients with a diagonal preconditioner,
/// starting from zero. Stops once `|r| <= rtol * |b|`.
pub fn jacobi_pcg(
    a: &CsMat<f64>,
    inv_diag: &[f64],
    b: &[f64],
    rtol: f64,
    max_iterations: usize,
) -> Result<Vec<f64>, SolverError> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut residual = 1.0;
    for it in 0..max_iterations {
        let ap = spmv(a, &p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(SolverError::Divergence { residual, iterations: it });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = norm(&r) / bnorm;
        if residual <= rtol {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolverError::Divergence {
        residual,
        iterations: max_iterations,
    })
}

use super::{SaddleSystem, Scheme};
use crate::{Error, Real, Result};
use nalgebra::DMatrix;

/// Discrete inf-sup constant of a full system, computed densely:
/// `beta^2` is the smallest eigenvalue of `B A^{-1} B^T` on zero-mean pressures, with the
/// velocity measured in the discrete energy norm and the pressure in L2.
pub fn inf_sup_constant<T: Real>(system: &SaddleSystem<T>) -> Result<f64> {
    if system.scheme != Scheme::Full {
        return Err(Error::Config("inf-sup sampling needs the full system".into()));
    }
    let nu = system.unknowns.n_velocity;
    let pressure_rows: Vec<usize> = system.unknowns.pressure.iter().flatten().flatten().copied().collect();
    let np = pressure_rows.len();
    let mut pos = vec![usize::MAX; system.dim()];
    for (i, &r) in pressure_rows.iter().enumerate() {
        pos[r] = i;
    }
    let mut a = DMatrix::<f64>::zeros(nu, nu);
    let mut b = DMatrix::<f64>::zeros(np, nu);
    for (i, j, v) in system.matrix.entries() {
        if i < nu && j < nu {
            a[(i, j)] += v;
        } else if j < nu && pos[i] != usize::MAX {
            b[(pos[i], j)] += v;
        }
    }
    let chol = a.cholesky().ok_or_else(|| Error::Singular("velocity block is not positive definite".into()))?;
    let s = &b * chol.solve(&b.transpose());
    // zero-mean pressures: project out the mean direction
    let mut c = nalgebra::DVector::<f64>::zeros(np);
    for (cell, modes) in system.unknowns.pressure.iter().enumerate() {
        if let Some(r) = modes[0] {
            c[pos[r]] = system.elements[cell].ctx.area.to_f64_lossy().sqrt();
        }
    }
    c /= c.norm();
    let proj = DMatrix::identity(np, np) - &c * c.transpose();
    let sp = &proj * s * &proj;
    let sym = (&sp + sp.transpose()) * 0.5;
    let mut eig: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // eig[0] belongs to the projected-out mean direction
    Ok(eig.get(1).copied().unwrap_or(0.0).max(0.0).sqrt())
}

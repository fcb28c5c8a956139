use super::monomial::{diff_matrix, mul_matrix, n_mono};
use crate::{Error, Real, Result};
use nalgebra::{DMatrix, DVector};

/// Which complement of `grad P_{k-1}` inside `[P_{k-2}]^2` is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// `x_perp * P_{k-3}` with `x_perp = ((y - y_K) / h_K, -(x - x_K) / h_K)`.
    #[default]
    Rotational,
    /// The L2-orthogonal complement, orthonormalized.
    Orthogonal,
}

/// Splitting `[P_{k-2}]^2 = grad P_{k-1} + complement`.
///
/// Vector polynomials are coefficient vectors of length `2 n_mono(k - 2)`: the x-component
/// monomial coefficients followed by the y-component ones.
#[derive(Debug, Clone)]
pub struct GradSplit<T: Real> {
    pub k: usize,
    pub mode: SplitMode,
    /// Columns `grad m_a` for `1 <= |a| <= k - 1`.
    pub grad: DMatrix<T>,
    /// Complement basis, `(k - 1)(k - 2) / 2` columns.
    pub comp: DMatrix<T>,
    solver: nalgebra::LU<T, nalgebra::Dyn, nalgebra::Dyn>,
    /// `int_K m_a` for `|a| <= k - 1`, used to fix the mean of the scalar potential.
    mono_int: DVector<T>,
    area: T,
}

/// `grad` from `P_s` into `[P_{s-1}]^2` coefficients.
pub fn grad_matrix<T: Real>(s: usize, h: T) -> DMatrix<T> {
    let dx = diff_matrix::<T>(s, 0, h);
    let dy = diff_matrix::<T>(s, 1, h);
    let mut g = DMatrix::zeros(dx.nrows() * 2, n_mono(s));
    g.rows_mut(0, dx.nrows()).copy_from(&dx);
    g.rows_mut(dx.nrows(), dx.nrows()).copy_from(&dy);
    g
}

pub fn vector_mass<T: Real>(h_s: &DMatrix<T>) -> DMatrix<T> {
    let n = h_s.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(h_s);
    m.view_mut((n, n), (n, n)).copy_from(h_s);
    m
}

impl<T: Real> GradSplit<T> {
    /// `mass` must hold the monomial mass matrix up to degree at least `k - 1`.
    pub fn new(k: usize, h: T, mass: &DMatrix<T>, mode: SplitMode) -> Result<Self> {
        if k < 2 {
            return Err(Error::UnsupportedDegree(k));
        }
        let n = n_mono(k - 2);
        let ng = n_mono(k - 1) - 1;
        let nc = (k - 1) * (k - 2) / 2;
        let grad = grad_matrix(k - 1, h).columns(1, ng).into_owned();
        let mut rot = DMatrix::zeros(2 * n, nc);
        if k >= 3 {
            let xs = mul_matrix::<T>(k - 3, 1, 0);
            let ys = mul_matrix::<T>(k - 3, 0, 1);
            for j in 0..nc {
                for r in 0..n {
                    rot[(r, j)] = ys[(r, j)];
                    rot[(n + r, j)] = -xs[(r, j)];
                }
            }
        }
        let comp = match mode {
            SplitMode::Rotational => rot,
            SplitMode::Orthogonal if nc == 0 => rot,
            SplitMode::Orthogonal => {
                let m = vector_mass(&mass.view((0, 0), (n, n)).into_owned());
                let gmg = grad.transpose() * &m * &grad;
                let chol = gmg.cholesky().ok_or_else(|| Error::Singular("gradient Gram matrix".into()))?;
                let coef = chol.solve(&(grad.transpose() * &m * &rot));
                let projected = &rot - &grad * coef;
                let gram = projected.transpose() * &m * &projected;
                let l = gram.cholesky().ok_or_else(|| Error::Singular("complement Gram matrix".into()))?.l();
                let linv_t = l
                    .solve_lower_triangular(&DMatrix::identity(nc, nc))
                    .ok_or_else(|| Error::Singular("complement Cholesky factor".into()))?
                    .transpose();
                projected * linv_t
            }
        };
        let mut full = DMatrix::zeros(2 * n, ng + nc);
        full.columns_mut(0, ng).copy_from(&grad);
        full.columns_mut(ng, nc).copy_from(&comp);
        let solver = full.lu();
        let mono_int = mass.view((0, 0), (n_mono(k - 1), 1)).column(0).into_owned();
        let area = mass[(0, 0)];
        Ok(Self { k, mode, grad, comp, solver, mono_int, area })
    }

    pub fn n_grad(&self) -> usize {
        self.grad.ncols()
    }

    pub fn n_comp(&self) -> usize {
        self.comp.ncols()
    }

    /// Splits `q` into `grad q_{k-1} + g`, returning the zero-mean `q_{k-1}` as `P_{k-1}`
    /// monomial coefficients and `g` as complement-basis coefficients.
    pub fn decompose(&self, q: &DVector<T>) -> Result<(DVector<T>, DVector<T>)> {
        let c = self
            .solver
            .solve(q)
            .ok_or_else(|| Error::Internal("vector polynomial splitting is singular".into()))?;
        let ng = self.n_grad();
        let mut pot = DVector::zeros(ng + 1);
        pot.rows_mut(1, ng).copy_from(&c.rows(0, ng));
        let mean = pot.dot(&self.mono_int) / self.area;
        pot[0] = -mean;
        Ok((pot, c.rows(ng, self.n_comp()).into_owned()))
    }

    /// The complement basis as vector polynomials (columns).
    pub fn complement_poly(&self) -> &DMatrix<T> {
        &self.comp
    }
}

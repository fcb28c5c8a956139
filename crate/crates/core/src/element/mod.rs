//! Local virtual element matrices on one cell.
//!
//! Velocity polynomials `[P_k]^2` use the basis `q_b = (m_b, 0)` for `b < n_mono(k)` and
//! `q_b = (0, m_{b - n_mono(k)})` after that. Pressures use the orthonormal basis of
//! `P_{k-1}`.

mod interp;
mod layout;

pub use interp::{interpolate, interpolate_pressure};
pub use layout::{dof_layout, DofLayout, ElementKind};

use crate::polybasis::{grad_matrix, monomial, n_mono, vector_mass, CellContext};
use crate::{Error, Real, Result};
use nalgebra::{DMatrix, DVector, Point2, RowDVector, Vector2};

#[derive(Debug, Clone)]
pub struct LocalElement<T: Real> {
    pub ctx: CellContext<T>,
    pub layout: DofLayout,
    pub nu: T,
    /// DoFs of the polynomial basis, `n_dof x 2 n_mono(k)`.
    pub d: DMatrix<T>,
    /// `G_bc = nu int grad q_b : grad q_c`.
    pub g: DMatrix<T>,
    /// `B_bi = a^K(q_b, phi_i)`.
    pub b: DMatrix<T>,
    /// Polynomial coefficients of `Pi^nabla phi_i`, one column per DoF.
    pub pi_nabla: DMatrix<T>,
    pub stiffness: DMatrix<T>,
    /// `int div phi_i m^_a` for `|a| <= k - 1`.
    pub div: DMatrix<T>,
    /// `[P_{k-2}]^2` coefficients of the L2 projection of each basis function.
    pub pi0: DMatrix<T>,
}

impl<T: Real> LocalElement<T> {
    pub fn new(ctx: CellContext<T>, kind: ElementKind, nu: T) -> Result<Self> {
        let layout = DofLayout::new(kind, ctx.k, ctx.points.len())?;
        let mut el = Self {
            ctx,
            layout,
            nu,
            d: DMatrix::zeros(0, 0),
            g: DMatrix::zeros(0, 0),
            b: DMatrix::zeros(0, 0),
            pi_nabla: DMatrix::zeros(0, 0),
            stiffness: DMatrix::zeros(0, 0),
            div: DMatrix::zeros(0, 0),
            pi0: DMatrix::zeros(0, 0),
        };
        el.d = el.polynomial_dofs();
        el.g = el.poly_stiffness();
        el.b = el.consistency_matrix()?;
        el.pi_nabla = el.projector()?;
        el.stiffness = el.stabilized_stiffness();
        el.div = el.divergence_matrix()?;
        el.pi0 = el.l2_projector()?;
        Ok(el)
    }

    pub fn kind(&self) -> ElementKind {
        self.layout.kind
    }

    pub fn n_dof(&self) -> usize {
        self.layout.total()
    }

    /// Dimension of `[P_k]^2`.
    pub fn n_poly(&self) -> usize {
        2 * n_mono(self.ctx.k)
    }

    /// Flux row: `F . dofs(v) = oint v . n`.
    pub fn flux_row(&self) -> RowDVector<T> {
        let mut row = RowDVector::zeros(self.n_dof());
        for (e, edge) in self.ctx.edges.iter().enumerate() {
            for (t, w) in edge.weights.iter().enumerate() {
                for c in 0..2 {
                    row[self.layout.boundary_dof(e, t, c)] += *w * edge.normal[c];
                }
            }
        }
        row
    }

    /// Row `R` with `R . dofs(v) = oint s v . n` for a scalar polynomial `s`.
    fn boundary_flux_row(&self, s: &DVector<T>) -> RowDVector<T> {
        let mut row = RowDVector::zeros(self.n_dof());
        for (e, edge) in self.ctx.edges.iter().enumerate() {
            for (t, (p, w)) in edge.nodes.iter().zip(&edge.weights).enumerate() {
                let val = *w * self.ctx.eval(s, p);
                for c in 0..2 {
                    row[self.layout.boundary_dof(e, t, c)] += val * edge.normal[c];
                }
            }
        }
        row
    }

    /// Row `R` with `R . dofs(v) = int_K v . q` for `q` in `[P_{k-2}]^2`.
    pub fn moment_row(&self, q: &DVector<T>) -> Result<RowDVector<T>> {
        let ctx = &self.ctx;
        let k = ctx.k;
        let lay = &self.layout;
        match lay.kind {
            ElementKind::Classic => {
                let mut row = RowDVector::zeros(self.n_dof());
                for j in 0..lay.n_gperp {
                    row[lay.offset_gperp() + j] = q[j] * ctx.area;
                }
                Ok(row)
            }
            ElementKind::DivFree => {
                let (pot, g) = ctx.split.decompose(q)?;
                // int v . grad pot = -int div v pot + oint pot v . n
                let ortho = ctx.orthonormal(k - 1);
                let d = &ortho * ctx.mass_matrix(k - 1) * &pot;
                let mut row = self.boundary_flux_row(&pot);
                row -= self.flux_row() * (d[0] * ctx.m0_hat());
                for a in 1..d.len() {
                    row[lay.offset_div() + a - 1] -= d[a];
                }
                for j in 0..lay.n_gperp {
                    row[lay.offset_gperp() + j] += g[j] * ctx.area;
                }
                Ok(row)
            }
        }
    }

    /// Values of the inner-moment test fields at `p` (complement basis or `[P_{k-2}]^2`).
    fn inner_test_fields(&self, p: &Point2<T>) -> Vec<Vector2<T>> {
        let ctx = &self.ctx;
        let n = n_mono(ctx.k - 2);
        let m = ctx.monomials(p, ctx.k - 2);
        match self.layout.kind {
            ElementKind::Classic => (0..2 * n)
                .map(|j| if j < n { Vector2::new(m[j], T::zero()) } else { Vector2::new(T::zero(), m[j - n]) })
                .collect(),
            ElementKind::DivFree => (0..ctx.split.n_comp())
                .map(|j| {
                    let c = ctx.split.comp.column(j);
                    let mut v = Vector2::zeros();
                    for r in 0..n {
                        v.x += c[r] * m[r];
                        v.y += c[n + r] * m[r];
                    }
                    v
                })
                .collect(),
        }
    }

    /// DoFs of every basis polynomial of `[P_k]^2` (the matrix `D`).
    pub fn polynomial_dofs(&self) -> DMatrix<T> {
        let ctx = &self.ctx;
        let k = ctx.k;
        let lay = &self.layout;
        let nk = n_mono(k);
        let mut d = DMatrix::zeros(lay.total(), 2 * nk);
        for (e, edge) in ctx.edges.iter().enumerate() {
            for (t, p) in edge.nodes.iter().enumerate() {
                let m = ctx.monomials(p, k);
                for b in 0..nk {
                    d[(lay.boundary_dof(e, t, 0), b)] = m[b];
                    d[(lay.boundary_dof(e, t, 1), nk + b)] = m[b];
                }
            }
        }
        let dx = monomial::diff_matrix::<T>(k, 0, ctx.h);
        let dy = monomial::diff_matrix::<T>(k, 1, ctx.h);
        let ortho = ctx.orthonormal(k - 1);
        let inv_area = T::one() / ctx.area;
        for (p, w) in ctx.quad.points.iter().zip(&ctx.quad.weights) {
            let m = ctx.monomials(p, k);
            let fields = self.inner_test_fields(p);
            for (j, f) in fields.iter().enumerate() {
                let row = lay.offset_gperp() + j;
                for b in 0..nk {
                    d[(row, b)] += *w * inv_area * m[b] * f.x;
                    d[(row, nk + b)] += *w * inv_area * m[b] * f.y;
                }
            }
            if lay.n_div > 0 {
                let mk1 = ctx.monomials(p, k - 1);
                let mhat = &ortho * DVector::from_vec(mk1.clone());
                let ddx = dx.transpose() * DVector::from_vec(mk1.clone());
                let ddy = dy.transpose() * DVector::from_vec(mk1);
                for a in 1..=lay.n_div {
                    let row = lay.offset_div() + a - 1;
                    let wa = *w * mhat[a];
                    for b in 0..nk {
                        d[(row, b)] += wa * ddx[b];
                        d[(row, nk + b)] += wa * ddy[b];
                    }
                }
            }
        }
        d
    }

    fn poly_stiffness(&self) -> DMatrix<T> {
        let ctx = &self.ctx;
        let k = ctx.k;
        let nk = n_mono(k);
        let h1 = ctx.mass_matrix(k - 1);
        let dx = monomial::diff_matrix::<T>(k, 0, ctx.h);
        let dy = monomial::diff_matrix::<T>(k, 1, ctx.h);
        let gs = (dx.transpose() * &h1 * &dx + dy.transpose() * &h1 * &dy) * self.nu;
        let mut g = DMatrix::zeros(2 * nk, 2 * nk);
        g.view_mut((0, 0), (nk, nk)).copy_from(&gs);
        g.view_mut((nk, nk), (nk, nk)).copy_from(&gs);
        g
    }

    /// `B_bi = -int nu lap q_b . phi_i + oint nu (grad q_b n) . phi_i`.
    pub fn consistency_matrix(&self) -> Result<DMatrix<T>> {
        let ctx = &self.ctx;
        let k = ctx.k;
        let nk = n_mono(k);
        let n2 = n_mono(k - 2);
        let lay = &self.layout;
        let lap = monomial::diff_matrix::<T>(k - 1, 0, ctx.h) * monomial::diff_matrix::<T>(k, 0, ctx.h)
            + monomial::diff_matrix::<T>(k - 1, 1, ctx.h) * monomial::diff_matrix::<T>(k, 1, ctx.h);
        let dx = monomial::diff_matrix::<T>(k, 0, ctx.h);
        let dy = monomial::diff_matrix::<T>(k, 1, ctx.h);
        let mut b = DMatrix::zeros(2 * nk, lay.total());
        for beta in 0..2 * nk {
            let (c, mono) = if beta < nk { (0, beta) } else { (1, beta - nk) };
            let mut q = DVector::zeros(2 * n2);
            for r in 0..n2 {
                q[c * n2 + r] = -self.nu * lap[(r, mono)];
            }
            let mut row = self.moment_row(&q)?;
            for (e, edge) in ctx.edges.iter().enumerate() {
                for (t, (p, w)) in edge.nodes.iter().zip(&edge.weights).enumerate() {
                    let m = ctx.monomials(p, k - 1);
                    let gx = (0..m.len()).fold(T::zero(), |acc, r| acc + dx[(r, mono)] * m[r]);
                    let gy = (0..m.len()).fold(T::zero(), |acc, r| acc + dy[(r, mono)] * m[r]);
                    row[lay.boundary_dof(e, t, c)] += self.nu * *w * (gx * edge.normal.x + gy * edge.normal.y);
                }
            }
            b.row_mut(beta).copy_from(&row);
        }
        Ok(b)
    }

    /// Solves `G Pi = B` with the constant rows replaced by `P^0(v - Pi v) = 0`.
    fn projector(&self) -> Result<DMatrix<T>> {
        let ctx = &self.ctx;
        let nk = n_mono(ctx.k);
        let n2 = n_mono(ctx.k - 2);
        let mut gt = self.g.clone();
        let mut bt = self.b.clone();
        let inv_area = T::one() / ctx.area;
        let ints = ctx.monomial_integrals(ctx.k);
        for c in 0..2 {
            let r = c * nk;
            gt.row_mut(r).fill(T::zero());
            for j in 0..nk {
                gt[(r, c * nk + j)] = ints[j] * inv_area;
            }
            let mut unit = DVector::zeros(2 * n2);
            unit[c * n2] = T::one();
            bt.row_mut(r).copy_from(&(self.moment_row(&unit)? * inv_area));
        }
        gt.lu().solve(&bt).ok_or_else(|| Error::Singular("energy projector system".into()))
    }

    fn stabilized_stiffness(&self) -> DMatrix<T> {
        let n = self.n_dof();
        let consistency = self.pi_nabla.transpose() * &self.g * &self.pi_nabla;
        let rem = DMatrix::identity(n, n) - &self.d * &self.pi_nabla;
        let a = consistency + rem.transpose() * rem * self.nu;
        (&a + a.transpose()) * T::lit(0.5)
    }

    /// Rows `int div phi_i m^_a`. For the divergence-free element these are the flux and
    /// the divergence moments themselves; for the classic element they follow from
    /// integrating by parts against the inner moments.
    pub fn divergence_matrix(&self) -> Result<DMatrix<T>> {
        let ctx = &self.ctx;
        let k = ctx.k;
        let nq = n_mono(k - 1);
        let mut div = DMatrix::zeros(nq, self.n_dof());
        match self.layout.kind {
            ElementKind::DivFree => {
                div.row_mut(0).copy_from(&(self.flux_row() * ctx.m0_hat()));
                for a in 1..nq {
                    div[(a, self.layout.offset_div() + a - 1)] = T::one();
                }
            }
            ElementKind::Classic => {
                let ortho = ctx.orthonormal(k - 1);
                let grad = grad_matrix(k - 1, ctx.h);
                for a in 0..nq {
                    let mhat = ortho.row(a).transpose();
                    let row = self.boundary_flux_row(&mhat) - self.moment_row(&(&grad * &mhat))?;
                    div.row_mut(a).copy_from(&row);
                }
            }
        }
        Ok(div)
    }

    fn l2_projector(&self) -> Result<DMatrix<T>> {
        let ctx = &self.ctx;
        let n2 = n_mono(ctx.k - 2);
        let m = vector_mass(&ctx.mass_matrix(ctx.k - 2));
        let mut r = DMatrix::zeros(2 * n2, self.n_dof());
        for j in 0..2 * n2 {
            let mut unit = DVector::zeros(2 * n2);
            unit[j] = T::one();
            r.row_mut(j).copy_from(&self.moment_row(&unit)?);
        }
        m.cholesky()
            .map(|c| c.solve(&r))
            .ok_or_else(|| Error::Singular("vector mass matrix".into()))
    }

    /// Load vector `int f . Pi^0_{k-2} phi_i`.
    pub fn load(&self, f: impl Fn(&Point2<T>) -> Vector2<T>) -> DVector<T> {
        let ctx = &self.ctx;
        let n2 = n_mono(ctx.k - 2);
        let mut moments = DVector::zeros(2 * n2);
        for (p, w) in ctx.quad.points.iter().zip(&ctx.quad.weights) {
            let fv = f(p);
            let m = ctx.monomials(p, ctx.k - 2);
            for r in 0..n2 {
                moments[r] += *w * fv.x * m[r];
                moments[n2 + r] += *w * fv.y * m[r];
            }
        }
        self.pi0.transpose() * moments
    }

    /// `a^K(q, p)` for two polynomials given by `[P_k]^2` coefficients.
    pub fn poly_energy(&self, q: &DVector<T>, p: &DVector<T>) -> T {
        q.dot(&(&self.g * p))
    }
}

/// Builds the divergence-free element.
pub fn div_free_element<T: Real>(ctx: CellContext<T>, nu: T) -> Result<LocalElement<T>> {
    LocalElement::new(ctx, ElementKind::DivFree, nu)
}

/// Builds the classic comparison element.
pub fn classic_element<T: Real>(ctx: CellContext<T>, nu: T) -> Result<LocalElement<T>> {
    LocalElement::new(ctx, ElementKind::Classic, nu)
}

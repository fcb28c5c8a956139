use super::{ElementKind, LocalElement};
use crate::polybasis::{gauss_legendre, grad_matrix};
use crate::Real;
use nalgebra::{DVector, Point2, Vector2};

/// Extra exactness used when integrating non-polynomial fields.
const EXTRA_DEGREE: usize = 6;

/// DoFs of an analytic velocity field. Divergence moments are integrated by parts,
/// `int div u m = oint u . n m - int u . grad m`, so no derivative of `u` is needed.
pub fn interpolate<T: Real>(el: &LocalElement<T>, u: impl Fn(&Point2<T>) -> Vector2<T>) -> DVector<T> {
    let ctx = &el.ctx;
    let lay = &el.layout;
    let k = ctx.k;
    let mut dofs = DVector::zeros(lay.total());
    for (e, edge) in ctx.edges.iter().enumerate() {
        for (t, p) in edge.nodes.iter().enumerate() {
            let v = u(p);
            dofs[lay.boundary_dof(e, t, 0)] = v.x;
            dofs[lay.boundary_dof(e, t, 1)] = v.y;
        }
    }
    let rule = ctx.quadrature_of_degree(2 * k + EXTRA_DEGREE);
    let ortho = ctx.orthonormal(k - 1);
    let grad = grad_matrix(k - 1, ctx.h);
    let n2 = grad.nrows() / 2;
    let inv_area = T::one() / ctx.area;
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let v = u(p);
        for (j, f) in el.inner_test_fields(p).iter().enumerate() {
            dofs[lay.offset_gperp() + j] += *w * inv_area * v.dot(f);
        }
        if lay.n_div > 0 {
            let m = DVector::from_vec(ctx.monomials(p, k - 2));
            for a in 1..=lay.n_div {
                let gm = &grad * ortho.row(a).transpose();
                let gx = gm.rows(0, n2).dot(&m);
                let gy = gm.rows(n2, n2).dot(&m);
                dofs[lay.offset_div() + a - 1] -= *w * (v.x * gx + v.y * gy);
            }
        }
    }
    if lay.kind == ElementKind::DivFree {
        let (x, wx) = gauss_legendre(k + EXTRA_DEGREE);
        for edge in &ctx.edges {
            let t = edge.end - edge.start;
            for (s, ws) in x.iter().zip(&wx) {
                let p = edge.start + t * T::lit(0.5 * (s + 1.0));
                let w = T::lit(0.5 * ws) * edge.length;
                let un = u(&p).dot(&edge.normal);
                let mhat = &ortho * DVector::from_vec(ctx.monomials(&p, k - 1));
                for a in 1..=lay.n_div {
                    dofs[lay.offset_div() + a - 1] += w * un * mhat[a];
                }
            }
        }
    }
    dofs
}

/// Orthonormal-basis coefficients `int p m^_a` of an analytic pressure.
pub fn interpolate_pressure<T: Real>(el: &LocalElement<T>, p: impl Fn(&Point2<T>) -> T) -> DVector<T> {
    let ctx = &el.ctx;
    let k = ctx.k;
    let rule = ctx.quadrature_of_degree(2 * k + EXTRA_DEGREE);
    let ortho = ctx.orthonormal(k - 1);
    let mut out = DVector::zeros(ortho.nrows());
    for (x, w) in rule.points.iter().zip(&rule.weights) {
        let mhat = &ortho * DVector::from_vec(ctx.monomials(x, k - 1));
        out += mhat * (*w * p(x));
    }
    out
}

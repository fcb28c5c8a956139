//! Polynomial algebra on one polygonal cell.

pub mod monomial;
mod quadrature;
mod split;

pub use monomial::{exponents, n_mono};
pub use quadrature::{gauss_legendre, gauss_lobatto, polygon_quadrature, QuadratureRule};
pub use split::{grad_matrix, vector_mass, GradSplit, SplitMode};

use crate::mesh::{chebyshev_center, polygon_area, polygon_centroid, polygon_diameter, Point2};
use crate::{Error, Real, Result};
use nalgebra::{DMatrix, DVector, Vector2};

/// One edge of a cell in the cell's counter-clockwise traversal.
#[derive(Debug, Clone)]
pub struct EdgeRule<T: Real> {
    pub start: Point2<T>,
    pub end: Point2<T>,
    pub length: T,
    /// Outward unit normal.
    pub normal: Vector2<T>,
    /// The `k + 1` Gauss-Lobatto points from `start` to `end`, endpoints included.
    pub nodes: Vec<Point2<T>>,
    /// Matching weights, already multiplied by the half-length.
    pub weights: Vec<T>,
}

/// Everything polynomial about one cell for degree `k`: scaled monomials, quadrature,
/// mass matrices, the orthonormal basis of `P_{k-1}` and the gradient splitting.
#[derive(Debug, Clone)]
pub struct CellContext<T: Real> {
    pub k: usize,
    pub points: Vec<Point2<T>>,
    pub centroid: Point2<T>,
    pub h: T,
    pub area: T,
    pub star_center: Point2<T>,
    pub quad: QuadratureRule<T>,
    pub edges: Vec<EdgeRule<T>>,
    /// `H_ab = int_K m_a m_b` for `|a|, |b| <= k`.
    pub mass: DMatrix<T>,
    /// Row `a` holds the monomial coefficients of the orthonormal `m^_a`, `|a| <= k - 1`.
    pub ortho: DMatrix<T>,
    pub split: GradSplit<T>,
}

impl<T: Real> CellContext<T> {
    pub fn new(points: &[Point2<T>], k: usize, mode: SplitMode) -> Result<Self> {
        if k < 2 {
            return Err(Error::UnsupportedDegree(k));
        }
        let (star_center, _) = chebyshev_center(points).ok_or_else(|| Error::Geometry {
            cell: usize::MAX,
            reason: "empty kernel: cell is not star-shaped".into(),
        })?;
        let quad = quadrature::polygon_quadrature_from(points, star_center, 2 * k + 2)?;
        let centroid = polygon_centroid(points);
        let h = polygon_diameter(points);
        let area = polygon_area(points);
        let (gl_x, gl_w) = gauss_lobatto(k + 1);
        let n = points.len();
        let edges = (0..n)
            .map(|i| {
                let (a, b) = (points[i], points[(i + 1) % n]);
                let t = b - a;
                let length = t.norm();
                EdgeRule {
                    start: a,
                    end: b,
                    length,
                    normal: Vector2::new(t.y, -t.x) / length,
                    nodes: gl_x.iter().map(|&x| a + t * T::lit(0.5 * (x + 1.0))).collect(),
                    weights: gl_w.iter().map(|&w| T::lit(0.5 * w) * length).collect(),
                }
            })
            .collect();
        let mut ctx = Self {
            k,
            points: points.to_vec(),
            centroid,
            h,
            area,
            star_center,
            quad,
            edges,
            mass: DMatrix::zeros(0, 0),
            ortho: DMatrix::zeros(0, 0),
            split: GradSplit::new(2, T::one(), &DMatrix::identity(3, 3), SplitMode::Rotational)?,
        };
        ctx.mass = ctx.mass_matrix(k);
        let nk1 = n_mono(k - 1);
        let l = ctx
            .mass
            .view((0, 0), (nk1, nk1))
            .into_owned()
            .cholesky()
            .ok_or_else(|| Error::Singular("monomial mass matrix".into()))?
            .l();
        ctx.ortho = l
            .solve_lower_triangular(&DMatrix::identity(nk1, nk1))
            .ok_or_else(|| Error::Singular("mass Cholesky factor".into()))?;
        ctx.split = GradSplit::new(k, h, &ctx.mass, mode)?;
        Ok(ctx)
    }

    pub fn scaled(&self, p: &Point2<T>) -> (T, T) {
        ((p.x - self.centroid.x) / self.h, (p.y - self.centroid.y) / self.h)
    }

    /// Values of all monomials of degree `<= s` at `p`.
    pub fn monomials(&self, p: &Point2<T>, s: usize) -> Vec<T> {
        let (xs, ys) = self.scaled(p);
        monomial::eval_scaled(s, xs, ys)
    }

    /// Evaluates a scalar polynomial given by monomial coefficients.
    pub fn eval(&self, coeffs: &DVector<T>, p: &Point2<T>) -> T {
        let s = degree_of(coeffs.len());
        self.monomials(p, s).iter().zip(coeffs.iter()).fold(T::zero(), |acc, (m, c)| acc + *m * *c)
    }

    /// Evaluates a vector polynomial (x coefficients then y coefficients).
    pub fn eval_vec(&self, coeffs: &DVector<T>, p: &Point2<T>) -> Vector2<T> {
        let n = coeffs.len() / 2;
        let s = degree_of(n);
        let m = self.monomials(p, s);
        let mut v = Vector2::zeros();
        for i in 0..n {
            v.x += m[i] * coeffs[i];
            v.y += m[i] * coeffs[n + i];
        }
        v
    }

    pub fn integrate(&self, f: impl Fn(&Point2<T>) -> T) -> T {
        self.quad.points.iter().zip(&self.quad.weights).fold(T::zero(), |acc, (p, w)| acc + *w * f(p))
    }

    /// Monomial mass matrix of degree `s` (computed by quadrature, needs `2s <= 2k + 2`).
    pub fn mass_matrix(&self, s: usize) -> DMatrix<T> {
        if s <= self.k && self.mass.nrows() >= n_mono(s) {
            return self.mass.view((0, 0), (n_mono(s), n_mono(s))).into_owned();
        }
        let n = n_mono(s);
        let mut h = DMatrix::zeros(n, n);
        for (p, w) in self.quad.points.iter().zip(&self.quad.weights) {
            let m = self.monomials(p, s);
            for i in 0..n {
                let wi = *w * m[i];
                for j in 0..=i {
                    h[(i, j)] += wi * m[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                h[(j, i)] = h[(i, j)];
            }
        }
        h
    }

    /// `int_K m_a` for `|a| <= s`.
    pub fn monomial_integrals(&self, s: usize) -> DVector<T> {
        self.mass_matrix(s).column(0).into_owned()
    }

    /// Orthonormal basis of `P_s`, `s <= k - 1`, as rows of monomial coefficients.
    pub fn orthonormal(&self, s: usize) -> DMatrix<T> {
        self.ortho.view((0, 0), (n_mono(s), n_mono(s))).into_owned()
    }

    /// Value of the constant orthonormal function, `1 / sqrt(|K|)`.
    pub fn m0_hat(&self) -> T {
        self.ortho[(0, 0)]
    }

    /// L2 projection onto `P_s` as monomial coefficients.
    pub fn l2_project(&self, f: impl Fn(&Point2<T>) -> T, s: usize) -> Result<DVector<T>> {
        let n = n_mono(s);
        let mut rhs = DVector::zeros(n);
        for (p, w) in self.quad.points.iter().zip(&self.quad.weights) {
            let m = self.monomials(p, s);
            let fw = *w * f(p);
            for i in 0..n {
                rhs[i] += fw * m[i];
            }
        }
        self.mass_matrix(s)
            .cholesky()
            .map(|c| c.solve(&rhs))
            .ok_or_else(|| Error::Singular("mass matrix in L2 projection".into()))
    }

    /// A quadrature rule of higher exactness on the same sub-triangulation.
    pub fn quadrature_of_degree(&self, d: usize) -> QuadratureRule<T> {
        quadrature::polygon_quadrature_from(&self.points, self.star_center, d)
            .expect("sub-triangulation already validated")
    }
}

/// Degree `s` with `n_mono(s) == n`.
pub fn degree_of(n: usize) -> usize {
    let mut s = 0;
    while n_mono(s) < n {
        s += 1;
    }
    debug_assert_eq!(n_mono(s), n, "coefficient count is not a full P_s");
    s
}

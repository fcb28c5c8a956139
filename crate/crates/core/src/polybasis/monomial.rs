//! Scaled monomials `m_a = ((x - x_K) / h_K)^a1 ((y - y_K) / h_K)^a2`.
//!
//! Ordering is by total degree, then by decreasing `a1`: `1, x, y, x^2, xy, y^2, ...`, so the
//! first `n_mono(s)` members span `P_s` for every `s`.

use crate::Real;
use nalgebra::DMatrix;

/// `dim P_s = (s + 1)(s + 2) / 2`.
pub const fn n_mono(s: usize) -> usize {
    (s + 1) * (s + 2) / 2
}

/// Position of the exponent `(a1, a2)` in the ordering.
pub const fn index(a1: usize, a2: usize) -> usize {
    let d = a1 + a2;
    d * (d + 1) / 2 + a2
}

pub fn exponents(s: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n_mono(s));
    for d in 0..=s {
        for a2 in 0..=d {
            out.push((d - a2, a2));
        }
    }
    out
}

/// Values of all monomials of degree `<= s` at scaled coordinates `(xs, ys)`.
pub fn eval_scaled<T: Real>(s: usize, xs: T, ys: T) -> Vec<T> {
    let mut px = vec![T::one(); s + 1];
    let mut py = vec![T::one(); s + 1];
    for i in 1..=s {
        px[i] = px[i - 1] * xs;
        py[i] = py[i - 1] * ys;
    }
    exponents(s).into_iter().map(|(a, b)| px[a] * py[b]).collect()
}

/// Matrix of `d/dx` (dir 0) or `d/dy` (dir 1) from `P_s` to `P_{s-1}` coefficients.
pub fn diff_matrix<T: Real>(s: usize, dir: usize, h: T) -> DMatrix<T> {
    let rows = if s == 0 { 0 } else { n_mono(s - 1) };
    let mut d = DMatrix::zeros(rows, n_mono(s));
    for (j, (a1, a2)) in exponents(s).into_iter().enumerate() {
        match dir {
            0 if a1 > 0 => d[(index(a1 - 1, a2), j)] = T::from_usize_lossy(a1) / h,
            1 if a2 > 0 => d[(index(a1, a2 - 1), j)] = T::from_usize_lossy(a2) / h,
            _ => {}
        }
    }
    d
}

/// Embeds `P_s` coefficients into `P_t`, `t >= s`.
pub fn embed_matrix<T: Real>(s: usize, t: usize) -> DMatrix<T> {
    let mut e = DMatrix::zeros(n_mono(t), n_mono(s));
    for j in 0..n_mono(s) {
        e[(j, j)] = T::one();
    }
    e
}

/// Multiplication by the monomial `m_(b1, b2)` from `P_s` to `P_{s + b1 + b2}`.
pub fn mul_matrix<T: Real>(s: usize, b1: usize, b2: usize) -> DMatrix<T> {
    let mut m = DMatrix::zeros(n_mono(s + b1 + b2), n_mono(s));
    for (j, (a1, a2)) in exponents(s).into_iter().enumerate() {
        m[(index(a1 + b1, a2 + b2), j)] = T::one();
    }
    m
}

//! Dense Taylor-Hood (P2-P1) approximation of the local virtual space of degree 2.
//!
//! Each degree-2 virtual function solves a small Stokes problem on its cell: given the
//! boundary trace and the divergence moments, `-lap v - grad s = 0` with `div v` in `P_1`.
//! The cell is fanned from its star centre, refined uniformly, and the problem is solved
//! with continuous P2 velocities and P1 pressures; the pressure mean is fixed by a
//! multiplier. The result approximates `a^K(phi_i, phi_j)` for the exact basis.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Point2, Vector2};
use std::collections::HashMap;
use vem_stokes::element::LocalElement;
use vem_stokes::polybasis::polygon_quadrature;

pub struct SubMesh {
    pub nodes: Vec<Point2<f64>>,
    /// Six P2 nodes per triangle: vertices, then midpoints of edges 01, 12, 20.
    pub tris: Vec<[usize; 6]>,
    /// Whether a node is a P1 vertex, and its pressure index.
    pub pressure_index: Vec<Option<usize>>,
    pub n_pressure: usize,
    pub on_boundary: Vec<bool>,
}

fn key(p: &Point2<f64>, scale: f64) -> (i64, i64) {
    ((p.x / scale * 1e9).round() as i64, (p.y / scale * 1e9).round() as i64)
}

fn dist_to_segment(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

pub fn submesh(points: &[Point2<f64>], center: Point2<f64>, levels: usize, h: f64) -> SubMesh {
    let n = points.len();
    let mut tris: Vec<[Point2<f64>; 3]> = (0..n).map(|i| [center, points[i], points[(i + 1) % n]]).collect();
    for _ in 0..levels {
        tris = tris
            .iter()
            .flat_map(|[a, b, c]| {
                let (ab, bc, ca) = (nalgebra::center(a, b), nalgebra::center(b, c), nalgebra::center(c, a));
                [[*a, ab, ca], [ab, *b, bc], [ca, bc, *c], [ab, bc, ca]]
            })
            .collect();
    }
    let mut nodes = Vec::new();
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut is_vertex = Vec::new();
    let mut id = |p: Point2<f64>, vertex: bool, nodes: &mut Vec<Point2<f64>>, is_vertex: &mut Vec<bool>| {
        *ids.entry(key(&p, h)).or_insert_with(|| {
            nodes.push(p);
            is_vertex.push(vertex);
            nodes.len() - 1
        })
    };
    let mut out = Vec::new();
    for [a, b, c] in &tris {
        let va = id(*a, true, &mut nodes, &mut is_vertex);
        let vb = id(*b, true, &mut nodes, &mut is_vertex);
        let vc = id(*c, true, &mut nodes, &mut is_vertex);
        let m0 = id(nalgebra::center(a, b), false, &mut nodes, &mut is_vertex);
        let m1 = id(nalgebra::center(b, c), false, &mut nodes, &mut is_vertex);
        let m2 = id(nalgebra::center(c, a), false, &mut nodes, &mut is_vertex);
        out.push([va, vb, vc, m0, m1, m2]);
    }
    let mut n_pressure = 0;
    let pressure_index = is_vertex
        .iter()
        .map(|v| {
            v.then(|| {
                n_pressure += 1;
                n_pressure - 1
            })
        })
        .collect();
    let on_boundary = nodes
        .iter()
        .map(|p| (0..n).any(|i| dist_to_segment(p, &points[i], &points[(i + 1) % n]) < 1e-10 * h))
        .collect();
    SubMesh { nodes, tris: out, pressure_index, n_pressure, on_boundary }
}

/// P2 shape functions and gradients on a triangle at barycentric coordinates `l`.
fn p2(l: [f64; 3], grad_l: [Vector2<f64>; 3]) -> ([f64; 6], [Vector2<f64>; 6]) {
    let mut v = [0.0; 6];
    let mut g = [Vector2::zeros(); 6];
    for i in 0..3 {
        v[i] = l[i] * (2.0 * l[i] - 1.0);
        g[i] = grad_l[i] * (4.0 * l[i] - 1.0);
    }
    for (m, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
        v[3 + m] = 4.0 * l[i] * l[j];
        g[3 + m] = (grad_l[i] * l[j] + grad_l[j] * l[i]) * 4.0;
    }
    (v, g)
}

struct Geometry {
    grad_l: [Vector2<f64>; 3],
    inv: nalgebra::Matrix2<f64>,
    a: Point2<f64>,
}

fn geometry(p: [Point2<f64>; 3]) -> Geometry {
    let j = nalgebra::Matrix2::from_columns(&[p[1] - p[0], p[2] - p[0]]);
    let inv = j.try_inverse().expect("degenerate sub-triangle");
    // rows of inv are the gradients of l1, l2
    let g1 = Vector2::new(inv[(0, 0)], inv[(0, 1)]);
    let g2 = Vector2::new(inv[(1, 0)], inv[(1, 1)]);
    Geometry { grad_l: [-g1 - g2, g1, g2], inv, a: p[0] }
}

fn bary(g: &Geometry, x: &Point2<f64>) -> [f64; 3] {
    let r = g.inv * (x - g.a);
    [1.0 - r.x - r.y, r.x, r.y]
}

/// `[a^K(phi_i, phi_j)]` for the Taylor-Hood approximations of the DoF basis of `el`.
pub fn oracle_stiffness(el: &LocalElement<f64>, levels: usize) -> DMatrix<f64> {
    let ctx = &el.ctx;
    assert_eq!(ctx.k, 2, "the oracle resolves the degree-2 space only");
    let lay = el.layout;
    let mesh = submesh(&ctx.points, ctx.star_center, levels, ctx.h);
    let nn = mesh.nodes.len();
    let nv = 2 * nn;
    let np = mesh.n_pressure;
    let mut a = DMatrix::<f64>::zeros(nv, nv);
    let mut b = DMatrix::<f64>::zeros(np, nv);
    let mut c = DVector::<f64>::zeros(np);
    // pressure test functions against the monomials of P_1 for the divergence data
    let n_div_poly = 3;
    let mut qm = DMatrix::<f64>::zeros(np, n_div_poly);
    let ortho = ctx.orthonormal(1);
    for t in &mesh.tris {
        let pts = [mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]];
        let geo = geometry(pts);
        let rule = polygon_quadrature(&pts, 4).unwrap();
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            let l = bary(&geo, x);
            let (_, g) = p2(l, geo.grad_l);
            let mono = ctx.monomials(x, 1);
            for i in 0..6 {
                for j in 0..6 {
                    let v = w * el.nu * g[i].dot(&g[j]);
                    for comp in 0..2 {
                        a[(2 * t[i] + comp, 2 * t[j] + comp)] += v;
                    }
                }
            }
            for q in 0..3 {
                let pi = mesh.pressure_index[t[q]].unwrap();
                let lq = l[q];
                c[pi] += w * lq;
                for j in 0..6 {
                    for comp in 0..2 {
                        b[(pi, 2 * t[j] + comp)] += w * lq * g[j][comp];
                    }
                }
                for (m, mv) in mono.iter().enumerate() {
                    qm[(pi, m)] += w * lq * mv;
                }
            }
        }
    }
    // saddle matrix on interior velocities, all pressures and the mean multiplier
    let interior: Vec<usize> = (0..nv).filter(|&i| !mesh.on_boundary[i / 2]).collect();
    let boundary: Vec<usize> = (0..nv).filter(|&i| mesh.on_boundary[i / 2]).collect();
    let ni = interior.len();
    let mut k = DMatrix::<f64>::zeros(ni + np + 1, ni + np + 1);
    for (r, &i) in interior.iter().enumerate() {
        for (s, &j) in interior.iter().enumerate() {
            k[(r, s)] = a[(i, j)];
        }
        for p in 0..np {
            k[(ni + p, r)] = b[(p, i)];
            k[(r, ni + p)] = b[(p, i)];
        }
    }
    for p in 0..np {
        k[(ni + p, ni + np)] = c[p];
        k[(ni + np, ni + p)] = c[p];
    }
    let lu = k.lu();

    let nd = lay.total();
    let mut basis = DMatrix::<f64>::zeros(nv, nd);
    for dof in 0..nd {
        let mut e = DVector::<f64>::zeros(nd);
        e[dof] = 1.0;
        // boundary trace: quadratic through the three edge nodes
        let mut gb = DVector::<f64>::zeros(nv);
        for &i in &boundary {
            let x = mesh.nodes[i / 2];
            let comp = i % 2;
            let (edge, rule) = ctx
                .edges
                .iter()
                .enumerate()
                .min_by(|(_, r1), (_, r2)| {
                    dist_to_segment(&x, &r1.start, &r1.end).total_cmp(&dist_to_segment(&x, &r2.start, &r2.end))
                })
                .unwrap();
            let s = (x - rule.start).dot(&(rule.end - rule.start)) / rule.length.powi(2);
            let ls = [2.0 * (s - 0.5) * (s - 1.0), -4.0 * s * (s - 1.0), 2.0 * s * (s - 0.5)];
            gb[i] = (0..3).map(|t| ls[t] * e[lay.boundary_dof(edge, t, comp)]).sum();
        }
        // divergence in orthonormal coordinates, the constant fixed by the flux
        let mut flux = 0.0;
        for (edge, rule) in ctx.edges.iter().enumerate() {
            for t in 0..3 {
                let v = Vector2::new(e[lay.boundary_dof(edge, t, 0)], e[lay.boundary_dof(edge, t, 1)]);
                flux += rule.weights[t] * v.dot(&rule.normal);
            }
        }
        let mut dhat = DVector::<f64>::zeros(3);
        dhat[0] = ctx.m0_hat() * flux;
        for al in 1..3 {
            dhat[al] = e[lay.offset_div() + al - 1];
        }
        let dmono = ortho.transpose() * dhat;
        let bd = &b * &gb;
        let ad = &a * &gb;
        let mut rhs = DVector::<f64>::zeros(ni + np + 1);
        for (r, &i) in interior.iter().enumerate() {
            rhs[r] = -ad[i];
        }
        let target = &qm * &dmono;
        for p in 0..np {
            rhs[ni + p] = target[p] - bd[p];
        }
        let sol = lu.solve(&rhs).expect("Taylor-Hood cell problem is singular");
        let mut v = gb;
        for (r, &i) in interior.iter().enumerate() {
            v[i] = sol[r];
        }
        basis.set_column(dof, &v);
    }
    basis.transpose() * a * basis
}

/// Non-zero eigenvalues of `a_h` relative to `reference` on the complement of the common
/// kernel, ascending.
pub fn relative_spectrum(a_h: &DMatrix<f64>, reference: &DMatrix<f64>) -> Vec<f64> {
    let eig = reference.clone().symmetric_eigen();
    let top = eig.eigenvalues.max();
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > 1e-9 * top).collect();
    let w = DMatrix::from_fn(reference.nrows(), keep.len(), |r, c| {
        eig.eigenvectors[(r, keep[c])] / eig.eigenvalues[keep[c]].sqrt()
    });
    let m = w.transpose() * a_h * &w;
    let m = (&m + m.transpose()) * 0.5;
    let mut out: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    out.sort_by(f64::total_cmp);
    out
}

use crate::mesh::{chebyshev_center, Point2};
use crate::{Error, Real, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, t);
            let step = p / dp;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, t);
        x[n - 1 - i] = t;
        w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// `P_n(t)` and `P_n'(t)`.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for m in 2..=n {
        let p2 = ((2 * m - 1) as f64 * t * p1 - (m - 1) as f64 * p0) / m as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (t * t - 1.0).abs() < 1e-300 {
        0.5 * (n * (n + 1)) as f64 * t.powi(n as i32 + 1)
    } else {
        n as f64 * (t * p1 - p0) / (t * t - 1.0)
    };
    (p1, dp)
}

/// Gauss-Lobatto nodes (endpoints included, increasing) and weights on `[-1, 1]`, `n >= 2`.
pub fn gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss-Lobatto needs at least two points");
    let m = n - 1;
    let mut x = vec![0.0; n];
    x[0] = -1.0;
    x[m] = 1.0;
    for j in 1..m {
        let mut t = -(std::f64::consts::PI * j as f64 / m as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, t);
            // (1 - t^2) P'' = 2 t P' - m (m + 1) P
            let d2p = (2.0 * t * dp - (m * (m + 1)) as f64 * p) / (1.0 - t * t);
            let step = dp / d2p;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x[j] = t;
    }
    let w = x
        .iter()
        .map(|&t| {
            let (p, _) = legendre(m, t);
            2.0 / ((n * m) as f64 * p * p)
        })
        .collect();
    (x, w)
}

#[derive(Debug, Clone)]
pub struct QuadratureRule<T: Real> {
    pub points: Vec<Point2<T>>,
    pub weights: Vec<T>,
    pub degree: usize,
}

/// Collapsed tensor Gauss rule on a triangle, exact for degree `d`.
fn triangle_rule<T: Real>(a: Point2<T>, b: Point2<T>, c: Point2<T>, d: usize, out: &mut QuadratureRule<T>) {
    let n = (d + 3) / 2;
    let (x, w) = gauss_legendre(n);
    let twice_area = (b - a).perp(&(c - a));
    for i in 0..n {
        let u = T::lit(0.5 * (x[i] + 1.0));
        let wu = T::lit(0.5 * w[i]);
        for j in 0..n {
            let v = T::lit(0.5 * (x[j] + 1.0));
            let wv = T::lit(0.5 * w[j]);
            out.points.push(a + (b - a) * u + (c - b) * (u * v));
            out.weights.push(wu * wv * u * twice_area);
        }
    }
}

/// Quadrature on a star-shaped polygon, exact for total degree `d`.
///
/// The polygon is fanned into triangles from the Chebyshev center of its kernel.
pub fn polygon_quadrature<T: Real>(pts: &[Point2<T>], d: usize) -> Result<QuadratureRule<T>> {
    let (center, _) = chebyshev_center(pts).ok_or_else(|| Error::Geometry {
        cell: usize::MAX,
        reason: "empty kernel: polygon is not star-shaped".into(),
    })?;
    polygon_quadrature_from(pts, center, d)
}

pub(crate) fn polygon_quadrature_from<T: Real>(
    pts: &[Point2<T>],
    center: Point2<T>,
    d: usize,
) -> Result<QuadratureRule<T>> {
    let mut rule = QuadratureRule { points: Vec::new(), weights: Vec::new(), degree: d };
    for i in 0..pts.len() {
        triangle_rule(center, pts[i], pts[(i + 1) % pts.len()], d, &mut rule);
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_is_exact() {
        for n in 1..10 {
            let (x, w) = gauss_legendre(n);
            for p in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p + 1) as f64 };
                assert_relative_eq!(q, exact, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn lobatto_rule_is_exact() {
        for n in 2..10 {
            let (x, w) = gauss_lobatto(n);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for p in 0..2 * n - 2 {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p + 1) as f64 };
                assert_relative_eq!(q, exact, epsilon = 1e-14);
            }
        }
        let (x, _) = gauss_lobatto(3);
        assert!(x[1].abs() < 1e-16);
        let (x, _) = gauss_lobatto(4);
        assert_relative_eq!(x[2], 1.0 / 5f64.sqrt(), epsilon = 1e-15);
    }

    fn unit_square() -> Vec<Point2<f64>> {
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)]
    }

    fn integrate(rule: &QuadratureRule<f64>, f: impl Fn(f64, f64) -> f64) -> f64 {
        rule.points.iter().zip(&rule.weights).map(|(p, w)| w * f(p.x, p.y)).sum()
    }

    #[test]
    fn unit_square_moments() {
        let r = polygon_quadrature(&unit_square(), 2).unwrap();
        assert_relative_eq!(integrate(&r, |_, _| 1.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(integrate(&r, |x, y| x * y), 0.25, epsilon = 1e-14);
        let r = polygon_quadrature(&unit_square(), 4).unwrap();
        assert_relative_eq!(integrate(&r, |x, y| x * x * y * y), 1.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn pentagon_area() {
        let pts: Vec<_> = (0..5)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
                Point2::new(t.cos(), t.sin())
            })
            .collect();
        let r = polygon_quadrature(&pts, 0).unwrap();
        let expected = 2.5 * (2.0 * std::f64::consts::PI / 5.0).sin();
        assert_relative_eq!(integrate(&r, |_, _| 1.0), expected, epsilon = 1e-13);
        assert_relative_eq!(expected, 2.37764, epsilon = 1e-5);
    }
}

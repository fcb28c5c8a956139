//! Manufactured solutions with closed-form right-hand sides, `f = -nu lap u - grad p`.

use crate::mesh::Point2;
use crate::Real;
use nalgebra::Vector2;
use rand::Rng;

pub type VectorFn<T> = dyn Fn(&Point2<T>) -> Vector2<T> + Send + Sync;
pub type ScalarFn<T> = dyn Fn(&Point2<T>) -> T + Send + Sync;

pub struct TestCase<T: Real> {
    pub name: String,
    pub nu: T,
    pub velocity: Box<VectorFn<T>>,
    pub pressure: Box<ScalarFn<T>>,
    pub force: Box<VectorFn<T>>,
}

impl<T: Real> TestCase<T> {
    /// Trigonometric divergence-free flow with `p = sin x - sin y`. Its trace on the unit
    /// square is not zero, so it is imposed as Dirichlet data.
    pub fn test1(nu: T) -> Self {
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        Self {
            name: "test1".into(),
            nu,
            velocity: Box::new(move |p| {
                let (cx, sx, cy, sy) = (p.x.cos(), p.x.sin(), p.y.cos(), p.y.sin());
                Vector2::new(-half * cx * cx * cy * sy, half * cy * cy * cx * sx)
            }),
            pressure: Box::new(|p| p.x.sin() - p.y.sin()),
            force: Box::new(move |p| {
                let (x2, y2) = (two * p.x, two * p.y);
                // lap u1 = sin 2y (1 + 2 cos 2x) / 2, lap u2 = -sin 2x (1 + 2 cos 2y) / 2
                let lap1 = half * y2.sin() * (T::one() + two * x2.cos());
                let lap2 = -half * x2.sin() * (T::one() + two * y2.cos());
                Vector2::new(-nu * lap1 - p.x.cos(), -nu * lap2 + p.y.cos())
            }),
        }
    }

    /// `u = (y^4 + 1, x^4 + 2)`, `p = x^3 - y^3`.
    pub fn test2(nu: T) -> Self {
        let twelve = T::lit(12.0);
        let three = T::lit(3.0);
        Self {
            name: "test2".into(),
            nu,
            velocity: Box::new(|p| Vector2::new(p.y.powi(4) + T::one(), p.x.powi(4) + T::lit(2.0))),
            pressure: Box::new(|p| p.x.powi(3) - p.y.powi(3)),
            force: Box::new(move |p| {
                Vector2::new(
                    -nu * twelve * p.y * p.y - three * p.x * p.x,
                    -nu * twelve * p.x * p.x + three * p.y * p.y,
                )
            }),
        }
    }

    /// `u = curl psi` with `psi` of degree `k + 1` and `p` of degree `k - 1`, random
    /// coefficients in `[-1, 1]`.
    pub fn random_polynomial(k: usize, nu: T, rng: &mut impl Rng) -> Self {
        let psi = Poly::random(k + 1, rng);
        let p = Poly::random(k - 1, rng);
        Self::from_stream_function(format!("poly{k}"), nu, &psi, &p)
    }

    pub fn from_stream_function(name: String, nu: T, psi: &Poly, p: &Poly) -> Self {
        let u1 = psi.dy();
        let u2 = psi.dx().scale(-1.0);
        let f1 = u1.laplacian().scale(-nu.to_f64_lossy()).add(&p.dx().scale(-1.0));
        let f2 = u2.laplacian().scale(-nu.to_f64_lossy()).add(&p.dy().scale(-1.0));
        let (p, u1c, u2c) = (p.clone(), u1.clone(), u2.clone());
        Self {
            name,
            nu,
            velocity: Box::new(move |x| Vector2::new(u1c.eval(x), u2c.eval(x))),
            pressure: Box::new(move |x| p.eval(x)),
            force: Box::new(move |x| Vector2::new(f1.eval(x), f2.eval(x))),
        }
    }
}

/// Bivariate polynomial, `c[i][j]` multiplies `x^i y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub c: Vec<Vec<f64>>,
}

impl Poly {
    pub fn zero(degree: usize) -> Self {
        Self { c: vec![vec![0.0; degree + 1]; degree + 1] }
    }

    pub fn degree_bound(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn random(degree: usize, rng: &mut impl Rng) -> Self {
        let mut p = Self::zero(degree);
        for i in 0..=degree {
            for j in 0..=degree - i {
                p.c[i][j] = rng.gen_range(-1.0..=1.0);
            }
        }
        p
    }

    pub fn eval<T: Real>(&self, p: &Point2<T>) -> T {
        // Horner in x of Horner in y
        let mut acc = T::zero();
        for row in self.c.iter().rev() {
            let mut r = T::zero();
            for &v in row.iter().rev() {
                r = r * p.y + T::lit(v);
            }
            acc = acc * p.x + r;
        }
        acc
    }

    pub fn dx(&self) -> Self {
        let mut out = Self::zero(self.degree_bound());
        for i in 1..self.c.len() {
            for j in 0..self.c[i].len() {
                out.c[i - 1][j] = i as f64 * self.c[i][j];
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let mut out = Self::zero(self.degree_bound());
        for i in 0..self.c.len() {
            for j in 1..self.c[i].len() {
                out.c[i][j - 1] = j as f64 * self.c[i][j];
            }
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        self.dx().dx().add(&self.dy().dy())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c: self.c.iter().map(|r| r.iter().map(|v| v * s).collect()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        let mut out = Self::zero(n.saturating_sub(1));
        for src in [self, other] {
            for (i, row) in src.c.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    out.c[i][j] += v;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fd_force(case: &TestCase<f64>, p: &Point2<f64>) -> Vector2<f64> {
        let e = 1e-4;
        let u = |x: f64, y: f64| (case.velocity)(&Point2::new(x, y));
        let q = |x: f64, y: f64| (case.pressure)(&Point2::new(x, y));
        let lap = (u(p.x + e, p.y) + u(p.x - e, p.y) + u(p.x, p.y + e) + u(p.x, p.y - e) - u(p.x, p.y) * 4.0) / (e * e);
        let grad = Vector2::new(q(p.x + e, p.y) - q(p.x - e, p.y), q(p.x, p.y + e) - q(p.x, p.y - e)) / (2.0 * e);
        -lap * case.nu - grad
    }

    fn fd_divergence(case: &TestCase<f64>, p: &Point2<f64>) -> f64 {
        let e = 1e-5;
        let u = |x: f64, y: f64| (case.velocity)(&Point2::new(x, y));
        (u(p.x + e, p.y).x - u(p.x - e, p.y).x + u(p.x, p.y + e).y - u(p.x, p.y - e).y) / (2.0 * e)
    }

    #[test]
    fn closed_form_forces_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cases = [TestCase::test1(1.0), TestCase::test1(0.3), TestCase::test2(1.0), TestCase::random_polynomial(4, 2.0, &mut rng)];
        for case in &cases {
            for _ in 0..100 {
                let p = Point2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let f = (case.force)(&p);
                let diff = (fd_force(case, &p) - f).amax() / f.amax().max(1.0);
                assert!(diff < 1e-6, "{}: {diff}", case.name);
                assert!(fd_divergence(case, &p).abs() < 1e-8, "{}", case.name);
            }
        }
    }

    #[test]
    fn test1_trace_is_not_zero() {
        let case = TestCase::<f64>::test1(1.0);
        assert!((case.velocity)(&Point2::new(0.0, 0.5)).x.abs() > 0.1);
    }

    #[test]
    fn poly_calculus() {
        // p = 1 + 2x + 3xy^2
        let mut p = Poly::zero(3);
        p.c[0][0] = 1.0;
        p.c[1][0] = 2.0;
        p.c[1][2] = 3.0;
        let pt = Point2::new(0.5, -2.0);
        assert_eq!(p.eval(&pt), 1.0 + 1.0 + 3.0 * 0.5 * 4.0);
        assert_eq!(p.dx().eval(&pt), 2.0 + 12.0);
        assert_eq!(p.dy().eval(&pt), 6.0 * 0.5 * -2.0);
        assert_eq!(p.laplacian().eval(&pt), 3.0);
    }
}

use super::{Point2, PolyMesh};
use crate::{Error, Real, Result};

/// Signed area by the shoelace formula (positive for counter-clockwise loops).
pub fn polygon_area<T: Real>(pts: &[Point2<T>]) -> T {
    let n = pts.len();
    let mut twice = T::zero();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        twice += a.x * b.y - b.x * a.y;
    }
    twice * T::lit(0.5)
}

pub fn polygon_centroid<T: Real>(pts: &[Point2<T>]) -> Point2<T> {
    let n = pts.len();
    // Shift to the first vertex to avoid cancellation on small cells far from the origin.
    let o = pts[0];
    let (mut cx, mut cy, mut twice) = (T::zero(), T::zero(), T::zero());
    for i in 0..n {
        let a = pts[i] - o;
        let b = pts[(i + 1) % n] - o;
        let cross = a.x * b.y - b.x * a.y;
        twice += cross;
        cx += (a.x + b.x) * cross;
        cy += (a.y + b.y) * cross;
    }
    let six_a = twice * T::lit(3.0);
    Point2::new(o.x + cx / six_a, o.y + cy / six_a)
}

/// Maximum distance between two vertices.
pub fn polygon_diameter<T: Real>(pts: &[Point2<T>]) -> T {
    let mut d = T::zero();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max((pts[i] - pts[j]).norm());
        }
    }
    d
}

fn orient<T: Real>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> T {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_intersect<T: Real>(p1: Point2<T>, p2: Point2<T>, q1: Point2<T>, q2: Point2<T>) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    let zero = T::zero();
    if ((d1 > zero && d2 < zero) || (d1 < zero && d2 > zero))
        && ((d3 > zero && d4 < zero) || (d3 < zero && d4 > zero))
    {
        return true;
    }
    let on = |a: Point2<T>, b: Point2<T>, p: Point2<T>, d: T| {
        d == zero
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// `true` when no two non-adjacent edges of the loop touch.
pub fn is_simple_polygon<T: Real>(pts: &[Point2<T>]) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Inward unit normal and offset of each edge: the cell lies in `n . x >= offset`.
fn edge_halfplanes<T: Real>(pts: &[Point2<T>]) -> Vec<(nalgebra::Vector2<T>, T)> {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let d = pts[(i + 1) % n] - pts[i];
            let normal = nalgebra::Vector2::new(-d.y, d.x) / d.norm();
            (normal, normal.dot(&pts[i].coords))
        })
        .collect()
}

/// Center and radius of the largest disc inside the kernel of a counter-clockwise polygon.
///
/// The kernel is the intersection of the inner half-planes of all edges, so the disc solves
/// `max r` subject to `n_i . x - r >= b_i`. The optimum sits at a vertex of that
/// three-variable polytope, which we find by enumerating constraint triples.
pub fn chebyshev_center<T: Real>(pts: &[Point2<T>]) -> Option<(Point2<T>, T)> {
    let planes = edge_halfplanes(pts);
    let m = planes.len();
    let scale = polygon_diameter(pts);
    let tol = scale * T::lit(1e-10).max(T::default_epsilon() * T::lit(64.0));
    let mut best: Option<(Point2<T>, T)> = None;
    for i in 0..m {
        for j in i + 1..m {
            for l in j + 1..m {
                let rows = [planes[i], planes[j], planes[l]];
                let a = nalgebra::Matrix3::from_fn(|r, c| match c {
                    0 => rows[r].0.x,
                    1 => rows[r].0.y,
                    _ => -T::one(),
                });
                let rhs = nalgebra::Vector3::new(rows[0].1, rows[1].1, rows[2].1);
                let Some(inv) = a.try_inverse() else { continue };
                let sol = inv * rhs;
                let (x, r) = (nalgebra::Vector2::new(sol[0], sol[1]), sol[2]);
                if r <= T::zero() || !r.is_finite() {
                    continue;
                }
                if planes.iter().all(|(nrm, b)| nrm.dot(&x) - r >= *b - tol)
                    && best.as_ref().map_or(true, |(_, rb)| r > *rb)
                {
                    best = Some((Point2::from(x), r));
                }
            }
        }
    }
    best
}

/// Kernel of a counter-clockwise polygon as a convex polygon (possibly empty).
pub fn kernel_polygon<T: Real>(pts: &[Point2<T>]) -> Vec<Point2<T>> {
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in pts {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let mut poly = vec![lo, Point2::new(hi.x, lo.y), hi, Point2::new(lo.x, hi.y)];
    for (normal, b) in edge_halfplanes(pts) {
        if poly.is_empty() {
            break;
        }
        let side = |p: &Point2<T>| normal.dot(&p.coords) - b;
        let mut out = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let (sp, sq) = (side(&p), side(&q));
            if sp >= T::zero() {
                out.push(p);
            }
            if (sp >= T::zero()) != (sq >= T::zero()) {
                let t = sp / (sp - sq);
                out.push(p + (q - p) * t);
            }
        }
        poly = out;
    }
    poly
}

/// Shape measures of one cell.
#[derive(Debug, Clone)]
pub struct CellGeometry<T: Real> {
    /// Chebyshev radius of the kernel divided by the diameter.
    pub star_ratio: T,
    pub star_center: Point2<T>,
    /// Minimum vertex-pair distance divided by the diameter.
    pub min_vertex_distance_ratio: T,
    pub kernel_area: T,
    pub convex: bool,
}

#[derive(Debug, Clone)]
pub struct GeometryReport<T: Real> {
    pub cells: Vec<CellGeometry<T>>,
}

impl<T: Real> GeometryReport<T> {
    pub fn min_star_ratio(&self) -> T {
        self.cells.iter().map(|c| c.star_ratio).fold(T::max_value().unwrap(), |a, b| a.min(b))
    }

    pub fn min_vertex_distance_ratio(&self) -> T {
        self.cells
            .iter()
            .map(|c| c.min_vertex_distance_ratio)
            .fold(T::max_value().unwrap(), |a, b| a.min(b))
    }
}

pub(crate) fn cell_geometry<T: Real>(cell: usize, pts: &[Point2<T>]) -> Result<CellGeometry<T>> {
    if !is_simple_polygon(pts) {
        return Err(Error::InvalidMesh(format!("cell {cell} is not a simple polygon")));
    }
    let diameter = polygon_diameter(pts);
    let (center, radius) = chebyshev_center(pts).ok_or_else(|| Error::Geometry {
        cell,
        reason: "empty kernel: cell is not star-shaped".into(),
    })?;
    let mut min_dist = T::max_value().unwrap();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            min_dist = min_dist.min((pts[i] - pts[j]).norm());
        }
    }
    let n = pts.len();
    let convex = (0..n).all(|i| orient(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]) >= T::zero());
    let kernel = kernel_polygon(pts);
    let kernel_area = if kernel.len() >= 3 { polygon_area(&kernel) } else { T::zero() };
    Ok(CellGeometry {
        star_ratio: radius / diameter,
        star_center: center,
        min_vertex_distance_ratio: min_dist / diameter,
        kernel_area,
        convex,
    })
}

/// Star-shapedness and vertex-separation ratios of every cell.
pub fn check_geometry<T: Real>(mesh: &PolyMesh<T>) -> Result<GeometryReport<T>> {
    let cells = (0..mesh.n_cells())
        .map(|c| cell_geometry(c, &mesh.cell_points(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeometryReport { cells })
}

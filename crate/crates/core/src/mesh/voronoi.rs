//! Centroidal Voronoi meshes of the unit square.
//!
//! Each cell is obtained by clipping the square with the bisector half-planes of nearby
//! seeds. Neighbours are visited ring by ring on a bucket grid and the search stops once
//! the ring is farther than twice the current cell radius, after which no other seed can
//! cut the cell.

use super::{Point2, PolyMesh};
use crate::{Error, Real, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct VoronoiOptions {
    pub n_seeds: usize,
    pub lloyd_iters: usize,
    pub rng_seed: u64,
}

const MAX_RESEEDS: usize = 8;

struct Buckets {
    n: usize,
    width: f64,
    items: Vec<Vec<usize>>,
}

impl Buckets {
    fn new<T: Real>(seeds: &[Point2<T>]) -> Self {
        let n = ((seeds.len() as f64).sqrt().ceil() as usize).max(1);
        let width = 1.0 / n as f64;
        let mut items = vec![Vec::new(); n * n];
        for (i, s) in seeds.iter().enumerate() {
            let (bx, by) = Self::index(n, s.x.to_f64_lossy(), s.y.to_f64_lossy());
            items[by * n + bx].push(i);
        }
        Self { n, width, items }
    }

    fn index(n: usize, x: f64, y: f64) -> (usize, usize) {
        let f = |c: f64| ((c * n as f64).floor().max(0.0) as usize).min(n - 1);
        (f(x), f(y))
    }

    /// Seeds whose bucket is at Chebyshev distance exactly `r` from `(bx, by)`.
    fn ring(&self, bx: usize, by: usize, r: usize, out: &mut Vec<usize>) {
        out.clear();
        let (bx, by, r, n) = (bx as isize, by as isize, r as isize, self.n as isize);
        for j in by - r..=by + r {
            for i in bx - r..=bx + r {
                if (i - bx).abs().max((j - by).abs()) != r || i < 0 || j < 0 || i >= n || j >= n {
                    continue;
                }
                out.extend_from_slice(&self.items[(j * n + i) as usize]);
            }
        }
    }
}

fn clip<T: Real>(poly: &[Point2<T>], seed: Point2<T>, other: Point2<T>) -> Vec<Point2<T>> {
    let d = other - seed;
    let mid = Point2::from((seed.coords + other.coords) * T::lit(0.5));
    let side = |p: &Point2<T>| (p - mid).dot(&d);
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sp, sq) = (side(&p), side(&q));
        if sp <= T::zero() {
            out.push(p);
        }
        if (sp <= T::zero()) != (sq <= T::zero()) {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

fn voronoi_cells<T: Real>(seeds: &[Point2<T>]) -> Vec<Vec<Point2<T>>> {
    let buckets = Buckets::new(seeds);
    let square = vec![
        Point2::new(T::zero(), T::zero()),
        Point2::new(T::one(), T::zero()),
        Point2::new(T::one(), T::one()),
        Point2::new(T::zero(), T::one()),
    ];
    let mut ring = Vec::new();
    seeds
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let (bx, by) = Buckets::index(buckets.n, s.x.to_f64_lossy(), s.y.to_f64_lossy());
            let mut poly = square.clone();
            for r in 0..=buckets.n {
                buckets.ring(bx, by, r, &mut ring);
                for &j in &ring {
                    if j != i {
                        poly = clip(&poly, s, seeds[j]);
                    }
                }
                let radius = poly.iter().map(|p| (p - s).norm()).fold(T::zero(), |a, b| a.max(b));
                if T::lit(r as f64 * buckets.width) > radius * T::lit(2.0) {
                    break;
                }
            }
            poly
        })
        .collect()
}

fn has_coincident_seeds<T: Real>(seeds: &[Point2<T>]) -> bool {
    let mut sorted: Vec<(f64, f64)> =
        seeds.iter().map(|s| (s.x.to_f64_lossy(), s.y.to_f64_lossy())).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Sorting by x only guarantees adjacency for exact duplicates; near-duplicates are
    // caught by the bucket scan below.
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return true;
    }
    let buckets = Buckets::new(seeds);
    let tol = 1e-10;
    let mut ring = Vec::new();
    for (i, s) in seeds.iter().enumerate() {
        let (bx, by) = Buckets::index(buckets.n, s.x.to_f64_lossy(), s.y.to_f64_lossy());
        for r in 0..=1 {
            buckets.ring(bx, by, r, &mut ring);
            if ring.iter().any(|&j| j != i && (seeds[j] - s).norm().to_f64_lossy() < tol) {
                return true;
            }
        }
    }
    false
}

/// Merges coincident polygon corners into shared vertex ids.
fn merge_vertices<T: Real>(polys: Vec<Vec<Point2<T>>>) -> (Vec<Point2<T>>, Vec<Vec<usize>>) {
    let tol = 1e-10;
    let grid = 1e-7;
    let mut vertices: Vec<Point2<T>> = Vec::new();
    let mut lookup: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
    let mut loops = Vec::with_capacity(polys.len());
    for poly in polys {
        let mut ids: Vec<usize> = Vec::with_capacity(poly.len());
        for p in poly {
            let (x, y) = (p.x.to_f64_lossy(), p.y.to_f64_lossy());
            let key = ((x / grid).floor() as i64, (y / grid).floor() as i64);
            let mut found = None;
            'search: for dj in -1..=1 {
                for di in -1..=1 {
                    if let Some(list) = lookup.get(&(key.0 + di, key.1 + dj)) {
                        for &v in list {
                            if (vertices[v] - p).norm().to_f64_lossy() < tol {
                                found = Some(v);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                vertices.push(p);
                lookup.entry(key).or_default().push(vertices.len() - 1);
                vertices.len() - 1
            });
            if ids.last() != Some(&id) {
                ids.push(id);
            }
        }
        while ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        loops.push(ids);
    }
    (vertices, loops)
}

/// Edges shorter than this fraction of the cell diameter are collapsed.
const SHORT_EDGE: f64 = 0.1;

fn boundary_sides<T: Real>(p: &Point2<T>) -> [bool; 4] {
    let on = |c: T, v: f64| (c.to_f64_lossy() - v).abs() < 1e-12;
    [on(p.x, 0.0), on(p.x, 1.0), on(p.y, 0.0), on(p.y, 1.0)]
}

fn is_convex<T: Real>(vertices: &[Point2<T>], ids: &[usize]) -> bool {
    let n = ids.len();
    n >= 3
        && (0..n).all(|i| {
            let (a, b, c) = (vertices[ids[i]], vertices[ids[(i + 1) % n]], vertices[ids[(i + 2) % n]]);
            let cross = (b - a).perp(&(c - b)).to_f64_lossy();
            cross > 1e-14 * (b - a).norm().to_f64_lossy() * (c - b).norm().to_f64_lossy()
        })
}

fn diameter<T: Real>(vertices: &[Point2<T>], ids: &[usize]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            d = d.max((vertices[a] - vertices[b]).norm().to_f64_lossy());
        }
    }
    d
}

/// Merges the endpoints of edges shorter than `SHORT_EDGE` times the cell diameter,
/// shortest first. Boundary vertices stay on their side and corners never move; a merge
/// that would leave a cell with fewer than three vertices or non-convex is skipped.
fn collapse_short_edges<T: Real>(vertices: &mut Vec<Point2<T>>, loops: &mut [Vec<usize>]) {
    let mut skipped = std::collections::HashSet::new();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for ids in loops.iter() {
            let h = diameter(vertices, ids);
            for i in 0..ids.len() {
                let (a, b) = (ids[i].min(ids[(i + 1) % ids.len()]), ids[i].max(ids[(i + 1) % ids.len()]));
                let ratio = (vertices[a] - vertices[b]).norm().to_f64_lossy() / h;
                if ratio < SHORT_EDGE && !skipped.contains(&(a, b)) && best.is_none_or(|(r, _, _)| ratio < r) {
                    best = Some((ratio, a, b));
                }
            }
        }
        let Some((_, a, b)) = best else { break };
        let (sa, sb) = (boundary_sides(&vertices[a]), boundary_sides(&vertices[b]));
        let count = |s: [bool; 4]| s.iter().filter(|x| **x).count();
        let target = match (count(sa), count(sb)) {
            (0, 0) => Some(nalgebra::center(&vertices[a], &vertices[b])),
            (_, 0) => Some(vertices[a]),
            (0, _) => Some(vertices[b]),
            (1, 1) if sa == sb => Some(nalgebra::center(&vertices[a], &vertices[b])),
            (2, 1) => Some(vertices[a]),
            (1, 2) => Some(vertices[b]),
            _ => None,
        };
        let Some(target) = target else {
            skipped.insert((a, b));
            continue;
        };
        let touched: Vec<usize> = (0..loops.len()).filter(|&c| loops[c].contains(&a) || loops[c].contains(&b)).collect();
        let saved_pos = vertices[a];
        let saved: Vec<Vec<usize>> = touched.iter().map(|&c| loops[c].clone()).collect();
        vertices[a] = target;
        for &c in &touched {
            let ids = &mut loops[c];
            for v in ids.iter_mut() {
                if *v == b {
                    *v = a;
                }
            }
            ids.dedup();
            while ids.len() > 1 && ids.first() == ids.last() {
                ids.pop();
            }
        }
        if !touched.iter().all(|&c| is_convex(vertices, &loops[c])) {
            vertices[a] = saved_pos;
            for (&c, ids) in touched.iter().zip(saved) {
                loops[c] = ids;
            }
            skipped.insert((a, b));
        }
    }
}

fn build_mesh<T: Real>(polys: Vec<Vec<Point2<T>>>) -> Result<PolyMesh<T>> {
    let (mut vertices, mut loops) = merge_vertices(polys);
    collapse_short_edges(&mut vertices, &mut loops);
    // drop vertices no cell refers to any more
    let mut new_id = vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for ids in loops.iter_mut() {
        for v in ids.iter_mut() {
            if new_id[*v] == usize::MAX {
                new_id[*v] = kept.len();
                kept.push(vertices[*v]);
            }
            *v = new_id[*v];
        }
    }
    PolyMesh::new(kept, loops)
}

/// Clipped centroidal Voronoi mesh of the unit square, deterministic in `rng_seed`.
pub fn generate_voronoi<T: Real>(opts: VoronoiOptions) -> Result<PolyMesh<T>> {
    if opts.n_seeds == 0 {
        return Err(Error::InvalidParameter("voronoi mesh needs at least one seed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    for _attempt in 0..MAX_RESEEDS {
        let mut seeds: Vec<Point2<T>> = (0..opts.n_seeds)
            .map(|_| Point2::new(T::lit(rng.gen::<f64>()), T::lit(rng.gen::<f64>())))
            .collect();
        if has_coincident_seeds(&seeds) {
            continue;
        }
        let mut polys = voronoi_cells(&seeds);
        let mut degenerate = false;
        for _ in 0..opts.lloyd_iters {
            seeds = polys.iter().map(|p| super::polygon_centroid(p)).collect();
            if has_coincident_seeds(&seeds) {
                degenerate = true;
                break;
            }
            polys = voronoi_cells(&seeds);
        }
        if degenerate || polys.iter().any(|p| p.len() < 3) {
            continue;
        }
        match build_mesh(polys) {
            Ok(mesh) => return Ok(mesh),
            Err(e) => log::warn!("voronoi attempt rejected: {e}"),
        }
    }
    Err(Error::Voronoi(format!(
        "no valid diagram for {} seeds after {MAX_RESEEDS} attempts",
        opts.n_seeds
    )))
}

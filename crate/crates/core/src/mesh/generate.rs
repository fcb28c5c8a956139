use super::{Point2, PolyMesh};
use crate::{Error, Real, Result};

fn lattice<T: Real>(n: usize) -> Vec<Point2<T>> {
    let step = T::one() / T::from_usize_lossy(n);
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            // The last row/column is set exactly so the domain is exactly the unit square.
            let x = if i == n { T::one() } else { T::from_usize_lossy(i) * step };
            let y = if j == n { T::one() } else { T::from_usize_lossy(j) * step };
            v.push(Point2::new(x, y));
        }
    }
    v
}

/// `n x n` axis-aligned squares covering the unit square.
pub fn generate_quad_grid<T: Real>(n: usize) -> Result<PolyMesh<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("quad grid needs n >= 1".into()));
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolyMesh::new(lattice(n), cells)
}

/// `n x n` squares each split by its lower-left to upper-right diagonal.
pub fn generate_triangle_grid<T: Real>(n: usize) -> Result<PolyMesh<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("triangle grid needs n >= 1".into()));
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            cells.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolyMesh::new(lattice(n), cells)
}

/// `n x n` squares each split into four triangles through its centre.
pub fn generate_crisscross_grid<T: Real>(n: usize) -> Result<PolyMesh<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("criss-cross grid needs n >= 1".into()));
    }
    let mut vertices = lattice::<T>(n);
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let step = T::one() / T::from_usize_lossy(n);
    let half = T::lit(0.5);
    let mut cells = Vec::with_capacity(4 * n * n);
    for j in 0..n {
        for i in 0..n {
            let c = vertices.len();
            vertices.push(Point2::new(
                (T::from_usize_lossy(i) + half) * step,
                (T::from_usize_lossy(j) + half) * step,
            ));
            let corners = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            for q in 0..4 {
                cells.push(vec![corners[q], corners[(q + 1) % 4], c]);
            }
        }
    }
    PolyMesh::new(vertices, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(m: &PolyMesh<f64>) -> (usize, usize, usize) {
        (m.n_cells(), m.n_interior_vertices(), m.n_interior_edges())
    }

    #[test]
    fn quad_grid_counts() {
        assert_eq!(counts(&generate_quad_grid(4).unwrap()), (16, 9, 24));
        assert_eq!(counts(&generate_quad_grid(1).unwrap()), (1, 0, 0));
        assert_eq!(counts(&generate_quad_grid(2).unwrap()), (4, 1, 4));
        let m = generate_quad_grid::<f64>(8).unwrap();
        assert!((m.h() - 2f64.sqrt() / 8.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_grid_counts() {
        assert_eq!(generate_triangle_grid::<f64>(2).unwrap().n_cells(), 8);
        assert_eq!(counts(&generate_triangle_grid(1).unwrap()), (2, 0, 1));
        assert_eq!(generate_triangle_grid::<f64>(4).unwrap().n_cells(), 32);
    }

    #[test]
    fn crisscross_grid_counts() {
        assert_eq!(counts(&generate_crisscross_grid(2).unwrap()), (16, 5, 20));
        assert_eq!(counts(&generate_crisscross_grid(1).unwrap()), (4, 1, 4));
        let m = generate_crisscross_grid::<f64>(4).unwrap();
        assert!((m.total_area() - 1.0).abs() < 1e-14);
        assert!((m.h() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_size_is_rejected() {
        assert!(matches!(generate_quad_grid::<f64>(0), Err(Error::InvalidParameter(_))));
        assert!(matches!(generate_triangle_grid::<f64>(0), Err(Error::InvalidParameter(_))));
        assert!(matches!(generate_crisscross_grid::<f64>(0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn edge_count_identity() {
        for m in [generate_quad_grid::<f64>(5).unwrap(), generate_triangle_grid(3).unwrap(), generate_crisscross_grid(3).unwrap()] {
            let sum_nk: usize = m.cells().iter().map(|c| c.n_edges()).sum();
            assert_eq!(sum_nk, 2 * m.n_interior_edges() + m.n_boundary_edges());
        }
    }
}

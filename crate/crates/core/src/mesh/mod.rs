//! Polygonal meshes of the unit square.
//!
//! A [`PolyMesh`] is built from a vertex list and counter-clockwise vertex loops; edges,
//! boundary flags and the interior counts `n_P`, `n_E`, `n_V` are derived on construction
//! and the mesh is immutable afterwards.

mod generate;
mod geometry;
mod io;
mod voronoi;

pub use generate::{generate_crisscross_grid, generate_quad_grid, generate_triangle_grid};
pub use geometry::{
    check_geometry, chebyshev_center, is_simple_polygon, kernel_polygon, polygon_area,
    polygon_centroid, polygon_diameter, CellGeometry, GeometryReport,
};
pub use io::{read_mesh, write_mesh, parse_mesh, format_mesh};
pub use voronoi::{generate_voronoi, VoronoiOptions};

use crate::{Error, Real, Result};
use std::collections::HashMap;

pub type Point2<T> = nalgebra::Point2<T>;

/// A polygonal cell: a counter-clockwise loop of vertex ids plus derived geometry.
#[derive(Debug, Clone)]
pub struct Cell<T: Real> {
    pub vertex_ids: Vec<usize>,
    pub area: T,
    pub centroid: Point2<T>,
    pub diameter: T,
    /// Edge ids in loop order; `edges[i]` joins `vertex_ids[i]` and `vertex_ids[i + 1]`.
    pub edges: Vec<usize>,
    /// `true` when the cell traverses `edges[i]` from its first to its second endpoint.
    pub edge_forward: Vec<bool>,
}

impl<T: Real> Cell<T> {
    /// Number of edges `n_K`.
    pub fn n_edges(&self) -> usize {
        self.vertex_ids.len()
    }
}

/// A mesh edge with endpoints stored in increasing id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub endpoints: [usize; 2],
    pub cells: Vec<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.cells.len() == 1
    }
}

#[derive(Debug, Clone)]
pub struct PolyMesh<T: Real> {
    vertices: Vec<Point2<T>>,
    cells: Vec<Cell<T>>,
    edges: Vec<Edge>,
    boundary_vertex: Vec<bool>,
    h: T,
}

impl<T: Real> PolyMesh<T> {
    /// Builds a mesh from vertices and counter-clockwise cell loops, validating topology.
    pub fn new(vertices: Vec<Point2<T>>, loops: Vec<Vec<usize>>) -> Result<Self> {
        if loops.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !(v.x.is_finite() && v.y.is_finite()) {
                return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
            }
        }
        let mut edge_lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut cells = Vec::with_capacity(loops.len());
        for (c, ids) in loops.into_iter().enumerate() {
            if ids.len() < 3 {
                return Err(Error::InvalidMesh(format!("cell {c} has fewer than 3 vertices")));
            }
            if let Some(&bad) = ids.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} references missing vertex {bad}"
                )));
            }
            let pts: Vec<Point2<T>> = ids.iter().map(|&v| vertices[v]).collect();
            let area = polygon_area(&pts);
            if area <= T::zero() {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} is not counter-clockwise (signed area {area})"
                )));
            }
            let n = ids.len();
            let mut cell_edges = Vec::with_capacity(n);
            let mut forward = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (ids[i], ids[(i + 1) % n]);
                if a == b {
                    return Err(Error::InvalidMesh(format!("cell {c} repeats vertex {a}")));
                }
                let key = (a.min(b), a.max(b));
                let e = *edge_lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge { endpoints: [key.0, key.1], cells: Vec::new() });
                    edges.len() - 1
                });
                if edges[e].cells.contains(&c) {
                    return Err(Error::InvalidMesh(format!("cell {c} uses edge {key:?} twice")));
                }
                edges[e].cells.push(c);
                if edges[e].cells.len() > 2 {
                    return Err(Error::InvalidMesh(format!(
                        "edge {key:?} is shared by more than two cells"
                    )));
                }
                cell_edges.push(e);
                forward.push(a < b);
            }
            cells.push(Cell {
                centroid: polygon_centroid(&pts),
                diameter: polygon_diameter(&pts),
                area,
                vertex_ids: ids,
                edges: cell_edges,
                edge_forward: forward,
            });
        }
        // An interior edge must be traversed in opposite directions by its two cells.
        for (e, edge) in edges.iter().enumerate() {
            if edge.cells.len() == 2 {
                let dir = |c: usize| {
                    let cell = &cells[c];
                    let i = cell.edges.iter().position(|&x| x == e).unwrap();
                    cell.edge_forward[i]
                };
                if dir(edge.cells[0]) == dir(edge.cells[1]) {
                    return Err(Error::InvalidMesh(format!(
                        "cells {} and {} overlap along edge {e}",
                        edge.cells[0], edge.cells[1]
                    )));
                }
            }
        }
        let mut boundary_vertex = vec![false; vertices.len()];
        let mut used = vec![false; vertices.len()];
        for edge in &edges {
            used[edge.endpoints[0]] = true;
            used[edge.endpoints[1]] = true;
            if edge.is_boundary() {
                boundary_vertex[edge.endpoints[0]] = true;
                boundary_vertex[edge.endpoints[1]] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {v} is not used by any cell")));
        }
        let h = cells.iter().map(|c| c.diameter).fold(T::zero(), |a, b| a.max(b));
        Ok(Self { vertices, cells, edges, boundary_vertex, h })
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell<T>] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &Cell<T> {
        &self.cells[c]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    /// Maximum cell diameter.
    pub fn h(&self) -> T {
        self.h
    }

    /// Number of cells `n_P`.
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Number of interior edges `n_E`.
    pub fn n_interior_edges(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_boundary()).count()
    }

    /// Number of interior vertices `n_V`.
    pub fn n_interior_vertices(&self) -> usize {
        self.boundary_vertex.iter().filter(|b| !**b).count()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary()).count()
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point2<T>> {
        self.cells[c].vertex_ids.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn total_area(&self) -> T {
        self.cells.iter().fold(T::zero(), |acc, c| acc + c.area)
    }

    /// Converts the coordinates to another scalar type.
    pub fn cast<U: Real>(&self) -> PolyMesh<U> {
        let vertices = self
            .vertices
            .iter()
            .map(|p| Point2::new(U::lit(p.x.to_f64_lossy()), U::lit(p.y.to_f64_lossy())))
            .collect();
        let loops = self.cells.iter().map(|c| c.vertex_ids.clone()).collect();
        PolyMesh::new(vertices, loops).expect("cast of a valid mesh stays valid")
    }
}

//! Global numbering, assembly and solution of the discrete Stokes problem.
//!
//! Velocity DoFs live in "slots": `2v + c` for vertex `v`, then `k - 1` nodes per edge in
//! the edge's canonical direction (lower vertex id first), then the inner moments and the
//! divergence moments of each cell. Boundary slots carry Dirichlet data and are eliminated.
//!
//! Unknowns are ordered `[u (interior slots), p0 per cell, p_perp per cell, lambda]`, where
//! pressures are coefficients in the orthonormal basis of `P_{k-1}(K)` and `lambda` is the
//! multiplier of the zero-mean condition `sum_K sqrt|K| p0_K = 0`. The reduced scheme drops
//! the divergence moments and `p_perp`.

mod assemble;
mod infsup;

pub use assemble::{
    assemble, boundary_values, build_elements, divergence_report, energy_seminorm, interpolate_global,
    interpolate_pressure_global, postprocess_pressure, subtract_mean,
    pressure_l2, pressure_mean, reduce_and_solve, solve, SaddleSystem, Solution, StokesProblem,
};
pub use infsup::inf_sup_constant;

use crate::element::{DofLayout, ElementKind};
use crate::mesh::PolyMesh;
use crate::polybasis::n_mono;
use crate::{Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Full,
    /// Divergence moments and non-constant pressures removed.
    Reduced,
}

/// What a velocity slot is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Vertex,
    Edge,
    Inner,
    Divergence,
}

#[derive(Debug, Clone)]
pub struct GlobalDofMap {
    pub k: usize,
    pub kind: ElementKind,
    pub n_cells: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    /// Inner moments per cell.
    pub n_inner: usize,
    /// Divergence moments per cell.
    pub n_div: usize,
    pub slot_kind: Vec<SlotKind>,
    pub boundary: Vec<bool>,
    /// Local DoF -> slot, per cell.
    pub cell_slots: Vec<Vec<usize>>,
    /// Orthonormal pressure modes per cell, `n_mono(k - 1)`.
    pub n_pressure_modes: usize,
}

impl GlobalDofMap {
    pub fn n_slots(&self) -> usize {
        self.slot_kind.len()
    }

    fn interior_count(&self, kind: SlotKind) -> usize {
        self.slot_kind.iter().zip(&self.boundary).filter(|(s, b)| **s == kind && !**b).count()
    }

    /// Interior vertex, edge, inner and divergence DoF counts (`phi_1..phi_4`).
    pub fn group_counts(&self) -> [usize; 4] {
        [
            self.interior_count(SlotKind::Vertex),
            self.interior_count(SlotKind::Edge),
            self.interior_count(SlotKind::Inner),
            self.interior_count(SlotKind::Divergence),
        ]
    }

    /// `dim V_h` by enumeration of interior slots.
    pub fn dim_v(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    /// `dim Q_h` (zero-mean piecewise `P_{k-1}`).
    pub fn dim_q(&self) -> usize {
        self.n_cells * self.n_pressure_modes - 1
    }

    pub fn dim_v_reduced(&self) -> usize {
        self.dim_v() - self.group_counts()[3]
    }

    pub fn dim_q_reduced(&self) -> usize {
        self.n_cells - 1
    }

    /// Unknowns removed by the reduction, `n_P ((k + 1) k - 2)` for the divergence-free element.
    pub fn reduction_saving(&self) -> usize {
        (self.dim_v() + self.dim_q()) - (self.dim_v_reduced() + self.dim_q_reduced())
    }
}

/// Closed-form `dim V_h` for the divergence-free element.
pub fn dim_v_formula(n_p: usize, n_v: usize, n_e: usize, k: usize) -> usize {
    n_p * ((k + 1) * k / 2 - 1 + (k - 1) * (k - 2) / 2) + 2 * (n_v + (k - 1) * n_e)
}

pub fn dim_q_formula(n_p: usize, k: usize) -> usize {
    n_p * (k + 1) * k / 2 - 1
}

pub fn dim_v_reduced_formula(n_p: usize, n_v: usize, n_e: usize, k: usize) -> usize {
    n_p * (k - 1) * (k - 2) / 2 + 2 * (n_v + (k - 1) * n_e)
}

pub fn dim_q_reduced_formula(n_p: usize) -> usize {
    n_p - 1
}

/// Numbers every velocity slot of `mesh` for degree `k`.
pub fn number_dofs<T: Real>(mesh: &PolyMesh<T>, k: usize, kind: ElementKind) -> Result<GlobalDofMap> {
    let nv = mesh.vertices().len();
    let ne = mesh.edges().len();
    let np = mesh.n_cells();
    let probe = DofLayout::new(kind, k, 3)?;
    let (n_inner, n_div) = (probe.n_gperp, probe.n_div);
    let mut slot_kind = Vec::new();
    let mut boundary = Vec::new();
    for v in 0..nv {
        slot_kind.extend([SlotKind::Vertex; 2]);
        boundary.extend([mesh.is_boundary_vertex(v); 2]);
    }
    for edge in mesh.edges() {
        for _ in 0..2 * (k - 1) {
            slot_kind.push(SlotKind::Edge);
            boundary.push(edge.is_boundary());
        }
    }
    let base_inner = slot_kind.len();
    slot_kind.extend(std::iter::repeat(SlotKind::Inner).take(np * n_inner));
    let base_div = slot_kind.len();
    slot_kind.extend(std::iter::repeat(SlotKind::Divergence).take(np * n_div));
    boundary.resize(slot_kind.len(), false);
    let edge_base = 2 * nv;
    let cell_slots = mesh
        .cells()
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let lay = DofLayout::new(kind, k, cell.n_edges())?;
            let mut slots = vec![0; lay.total()];
            for (i, &v) in cell.vertex_ids.iter().enumerate() {
                slots[2 * i] = 2 * v;
                slots[2 * i + 1] = 2 * v + 1;
            }
            for (e, (&g, &fwd)) in cell.edges.iter().zip(&cell.edge_forward).enumerate() {
                for t in 1..k {
                    let j = if fwd { t - 1 } else { k - 1 - t };
                    for comp in 0..2 {
                        slots[lay.boundary_dof(e, t, comp)] = edge_base + 2 * ((k - 1) * g + j) + comp;
                    }
                }
            }
            for j in 0..n_inner {
                slots[lay.offset_gperp() + j] = base_inner + c * n_inner + j;
            }
            for j in 0..n_div {
                slots[lay.offset_div() + j] = base_div + c * n_div + j;
            }
            Ok(slots)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GlobalDofMap {
        k,
        kind,
        n_cells: np,
        n_vertices: nv,
        n_edges: ne,
        n_inner,
        n_div,
        slot_kind,
        boundary,
        cell_slots,
        n_pressure_modes: n_mono(k - 1),
    })
}

/// Position of each unknown in the linear system for a given scheme.
#[derive(Debug, Clone)]
pub struct Unknowns {
    pub velocity: Vec<Option<usize>>,
    /// Per cell and orthonormal mode.
    pub pressure: Vec<Vec<Option<usize>>>,
    pub lambda: usize,
    pub n: usize,
    pub n_velocity: usize,
}

impl Unknowns {
    pub fn new(map: &GlobalDofMap, scheme: Scheme) -> Self {
        let mut n = 0;
        let velocity = map
            .slot_kind
            .iter()
            .zip(&map.boundary)
            .map(|(kind, b)| {
                if *b || (scheme == Scheme::Reduced && *kind == SlotKind::Divergence) {
                    None
                } else {
                    n += 1;
                    Some(n - 1)
                }
            })
            .collect();
        let n_velocity = n;
        let mut pressure: Vec<Vec<Option<usize>>> = vec![vec![None; map.n_pressure_modes]; map.n_cells];
        for p in pressure.iter_mut() {
            p[0] = Some(n);
            n += 1;
        }
        if scheme == Scheme::Full {
            for p in pressure.iter_mut() {
                for a in 1..map.n_pressure_modes {
                    p[a] = Some(n);
                    n += 1;
                }
            }
        }
        let lambda = n;
        n += 1;
        Self { velocity, pressure, lambda, n, n_velocity }
    }
}

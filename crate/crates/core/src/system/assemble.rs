use super::{GlobalDofMap, Scheme, Unknowns};
use crate::element::{ElementKind, LocalElement};
use crate::linalg::{SparseMatrix, Triplets};
use crate::mesh::{Point2, PolyMesh};
use crate::polybasis::{CellContext, SplitMode};
use crate::{Error, Real, Result};
use nalgebra::{DVector, Vector2};
use rayon::prelude::*;
use std::sync::Arc;

pub type Field<'a, T> = &'a (dyn Fn(&Point2<T>) -> Vector2<T> + Sync);

/// Data of one Stokes solve: `-nu lap u - grad p = f`, `div u = 0`, `u = g` on the boundary.
#[derive(Clone)]
pub struct StokesProblem<'a, T: Real> {
    pub mesh: &'a PolyMesh<T>,
    pub k: usize,
    pub kind: ElementKind,
    pub mode: SplitMode,
    /// Viscosity per cell.
    pub nu: Vec<T>,
    pub force: Field<'a, T>,
    pub dirichlet: Field<'a, T>,
    /// Shift the boundary data along the normal at edge nodes so that its discrete flux
    /// vanishes, which the divergence constraint requires.
    pub flux_correction: bool,
}

impl<'a, T: Real> StokesProblem<'a, T> {
    pub fn new(mesh: &'a PolyMesh<T>, k: usize, force: Field<'a, T>, dirichlet: Field<'a, T>) -> Self {
        Self {
            mesh,
            k,
            kind: ElementKind::DivFree,
            mode: SplitMode::Rotational,
            nu: vec![T::one(); mesh.n_cells()],
            force,
            dirichlet,
            flux_correction: true,
        }
    }
}

pub struct SaddleSystem<T: Real> {
    pub scheme: Scheme,
    pub map: GlobalDofMap,
    pub unknowns: Unknowns,
    pub elements: Arc<Vec<LocalElement<T>>>,
    pub loads: Arc<Vec<DVector<T>>>,
    /// Dirichlet values per velocity slot (zero on interior slots).
    pub boundary: Arc<DVector<T>>,
    /// Normal shift applied to the boundary data, zero when not needed.
    pub flux_correction: T,
    pub matrix: SparseMatrix,
    pub rhs: DVector<f64>,
    /// Required relative residual of the solve.
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct Solution<T: Real> {
    pub scheme: Scheme,
    pub postprocessed: bool,
    /// Velocity DoFs per slot, boundary values included.
    pub velocity: DVector<T>,
    /// Orthonormal pressure coefficients per cell.
    pub pressure: Vec<DVector<T>>,
    pub lambda: T,
    pub residual: f64,
}

impl<T: Real> Solution<T> {
    pub fn cell_velocity(&self, map: &GlobalDofMap, c: usize) -> DVector<T> {
        DVector::from_iterator(map.cell_slots[c].len(), map.cell_slots[c].iter().map(|&s| self.velocity[s]))
    }
}

pub fn build_elements<T: Real>(problem: &StokesProblem<'_, T>) -> Result<Vec<LocalElement<T>>> {
    let mesh = problem.mesh;
    if problem.nu.len() != mesh.n_cells() {
        return Err(Error::Config(format!(
            "{} viscosity values for {} cells",
            problem.nu.len(),
            mesh.n_cells()
        )));
    }
    (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let ctx = CellContext::new(&mesh.cell_points(c), problem.k, problem.mode)?;
            LocalElement::new(ctx, problem.kind, problem.nu[c])
        })
        .enumerate()
        .map(|(c, r)| {
            r.map_err(|e| match e {
                Error::Geometry { reason, .. } => Error::Geometry { cell: c, reason },
                other => other,
            })
        })
        .collect()
}

/// Dirichlet data at the boundary nodes, with the flux correction if requested.
pub fn boundary_values<T: Real>(
    problem: &StokesProblem<'_, T>,
    map: &GlobalDofMap,
    elements: &[LocalElement<T>],
) -> Result<(DVector<T>, T)> {
    let mesh = problem.mesh;
    let k = problem.k;
    let mut values = DVector::zeros(map.n_slots());
    let mut flux = T::zero();
    let mut inner_weight = T::zero();
    let mut inner_slots = Vec::new();
    for (c, cell) in mesh.cells().iter().enumerate() {
        let el = &elements[c];
        for (e, &g) in cell.edges.iter().enumerate() {
            if !mesh.edges()[g].is_boundary() {
                continue;
            }
            let rule = &el.ctx.edges[e];
            for t in 0..=k {
                let v = (problem.dirichlet)(&rule.nodes[t]);
                if !(v.x.is_finite() && v.y.is_finite()) {
                    return Err(Error::Config(format!("boundary data is not finite at {:?}", rule.nodes[t])));
                }
                for comp in 0..2 {
                    values[map.cell_slots[c][el.layout.boundary_dof(e, t, comp)]] = v[comp];
                }
                flux += rule.weights[t] * v.dot(&rule.normal);
                if t > 0 && t < k {
                    inner_weight += rule.weights[t];
                    inner_slots.push((c, e, t));
                }
            }
        }
    }
    let mut shift = T::zero();
    if problem.flux_correction && inner_weight > T::zero() {
        shift = flux / inner_weight;
        for (c, e, t) in inner_slots {
            let el = &elements[c];
            let n = el.ctx.edges[e].normal;
            for comp in 0..2 {
                values[map.cell_slots[c][el.layout.boundary_dof(e, t, comp)]] -= shift * n[comp];
            }
        }
    }
    Ok((values, shift))
}

pub fn assemble<T: Real>(problem: &StokesProblem<'_, T>, scheme: Scheme) -> Result<SaddleSystem<T>> {
    if scheme == Scheme::Reduced && problem.kind != ElementKind::DivFree {
        return Err(Error::Config("the reduced scheme needs the divergence-free element".into()));
    }
    let map = super::number_dofs(problem.mesh, problem.k, problem.kind)?;
    let elements = build_elements(problem)?;
    let (boundary, flux_correction) = boundary_values(problem, &map, &elements)?;
    let loads: Vec<DVector<T>> = elements.par_iter().map(|el| el.load(problem.force)).collect();
    SaddleSystem::from_parts(scheme, map, Arc::new(elements), Arc::new(loads), Arc::new(boundary), flux_correction)
}

const DEFAULT_TOLERANCE: f64 = 1e-10;

impl<T: Real> SaddleSystem<T> {
    pub fn from_parts(
        scheme: Scheme,
        map: GlobalDofMap,
        elements: Arc<Vec<LocalElement<T>>>,
        loads: Arc<Vec<DVector<T>>>,
        boundary: Arc<DVector<T>>,
        flux_correction: T,
    ) -> Result<Self> {
        let unknowns = Unknowns::new(&map, scheme);
        let n = unknowns.n;
        let pieces: Vec<(Triplets, Vec<(usize, f64)>)> = (0..map.n_cells)
            .into_par_iter()
            .map(|c| {
                let el = &elements[c];
                let slots = &map.cell_slots[c];
                let mut t = Triplets::new(n, n);
                let mut rhs = Vec::new();
                for (i, &si) in slots.iter().enumerate() {
                    let Some(r) = unknowns.velocity[si] else { continue };
                    rhs.push((r, loads[c][i].to_f64_lossy()));
                    for (j, &sj) in slots.iter().enumerate() {
                        let a = el.stiffness[(i, j)];
                        match unknowns.velocity[sj] {
                            Some(col) => t.push(r, col, a),
                            None if map.boundary[sj] => rhs.push((r, -(a * boundary[sj]).to_f64_lossy())),
                            None => {}
                        }
                    }
                }
                for (a, row) in unknowns.pressure[c].iter().enumerate() {
                    let Some(r) = *row else { continue };
                    for (j, &sj) in slots.iter().enumerate() {
                        let b = el.div[(a, j)];
                        match unknowns.velocity[sj] {
                            Some(col) => {
                                t.push(r, col, b);
                                t.push(col, r, b);
                            }
                            None if map.boundary[sj] => rhs.push((r, -(b * boundary[sj]).to_f64_lossy())),
                            None => {}
                        }
                    }
                }
                let p0 = unknowns.pressure[c][0].expect("constant pressure is always present");
                let weight = el.ctx.area.sqrt();
                t.push(p0, unknowns.lambda, weight);
                t.push(unknowns.lambda, p0, weight);
                (t, rhs)
            })
            .collect();
        let mut triplets = Triplets::new(n, n);
        let mut rhs = DVector::zeros(n);
        for (t, r) in pieces {
            triplets.extend(t);
            for (i, v) in r {
                rhs[i] += v;
            }
        }
        let matrix = triplets.build()?;
        Ok(Self {
            scheme,
            map,
            unknowns,
            elements,
            loads,
            boundary,
            flux_correction,
            matrix,
            rhs,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// The same problem with divergence moments and non-constant pressures deleted.
    pub fn reduced(&self) -> Result<Self> {
        if self.map.kind != ElementKind::DivFree {
            return Err(Error::Config("the reduced scheme needs the divergence-free element".into()));
        }
        Self::from_parts(
            Scheme::Reduced,
            self.map.clone(),
            self.elements.clone(),
            self.loads.clone(),
            self.boundary.clone(),
            self.flux_correction,
        )
    }

    pub fn dim(&self) -> usize {
        self.unknowns.n
    }

    /// Velocity and pressure unknowns, without the multiplier.
    pub fn n_dof(&self) -> usize {
        self.unknowns.n - 1
    }

    /// Splits a vector of unknowns into a solution.
    pub fn unpack(&self, x: &DVector<f64>, residual: f64) -> Solution<T> {
        let mut velocity = (*self.boundary).clone();
        for (s, idx) in self.unknowns.velocity.iter().enumerate() {
            if let Some(i) = idx {
                velocity[s] = T::lit(x[*i]);
            }
        }
        let pressure = self
            .unknowns
            .pressure
            .iter()
            .map(|modes| DVector::from_iterator(modes.len(), modes.iter().map(|m| m.map_or(T::zero(), |i| T::lit(x[i])))))
            .collect();
        Solution {
            scheme: self.scheme,
            postprocessed: false,
            velocity,
            pressure,
            lambda: T::lit(x[self.unknowns.lambda]),
            residual,
        }
    }
}

pub fn solve<T: Real>(system: &SaddleSystem<T>) -> Result<Solution<T>> {
    let context = || format!("{:?} system with {} unknowns, k = {}", system.scheme, system.dim(), system.map.k);
    let wrap = |e: Error| Error::Solve { context: context(), source: Box::new(e) };
    let lu = system.matrix.lu().map_err(wrap)?;
    let report = lu.solve(&system.rhs, system.tolerance).map_err(wrap)?;
    if report.relative_residual > system.tolerance {
        return Err(wrap(Error::Singular(format!(
            "relative residual {:.3e} above {:.1e}; the velocity-pressure coupling may be unstable on this mesh",
            report.relative_residual, system.tolerance
        ))));
    }
    log::debug!(
        "{}: residual {:.2e} after {} refinement steps",
        context(),
        report.relative_residual,
        report.refinement_steps
    );
    Ok(system.unpack(&report.x, report.relative_residual))
}

/// Solves the reduced counterpart of a full system; divergence moments come back as zero.
pub fn reduce_and_solve<T: Real>(system: &SaddleSystem<T>) -> Result<Solution<T>> {
    match system.scheme {
        Scheme::Reduced => solve(system),
        Scheme::Full => solve(&system.reduced()?),
    }
}

/// Recovers the non-constant pressure modes of a reduced solution cell by cell from the
/// divergence-moment rows: `p_a = f_a - sum_j a_h(phi_j, phi_a) u_j`.
pub fn postprocess_pressure<T: Real>(system: &SaddleSystem<T>, solution: &mut Solution<T>) -> Result<()> {
    if system.map.kind != ElementKind::DivFree {
        return Err(Error::Config("pressure recovery needs the divergence-free element".into()));
    }
    for c in 0..system.map.n_cells {
        let el = &system.elements[c];
        let u = solution.cell_velocity(&system.map, c);
        let off = el.layout.offset_div();
        for a in 1..el.layout.n_div + 1 {
            let row = off + a - 1;
            solution.pressure[c][a] = system.loads[c][row] - el.stiffness.row(row).transpose().dot(&u);
        }
    }
    solution.postprocessed = true;
    Ok(())
}

/// `||div u_h||_{L2(K)}` per cell; exact for the divergence-free element, the projection on
/// `P_{k-1}` for the classic one.
pub fn divergence_report<T: Real>(system: &SaddleSystem<T>, solution: &Solution<T>) -> Vec<T> {
    (0..system.map.n_cells)
        .map(|c| (&system.elements[c].div * solution.cell_velocity(&system.map, c)).norm())
        .collect()
}

/// `sqrt(sum_K a_h^K(v, v))` over all local DoFs of the slot vector `v`.
pub fn energy_seminorm<T: Real>(elements: &[LocalElement<T>], map: &GlobalDofMap, v: &DVector<T>) -> T {
    let mut total = T::zero();
    for (c, el) in elements.iter().enumerate() {
        let vk = DVector::from_iterator(map.cell_slots[c].len(), map.cell_slots[c].iter().map(|&s| v[s]));
        total += vk.dot(&(&el.stiffness * &vk));
    }
    total.max(T::zero()).sqrt()
}

pub fn pressure_l2<T: Real>(p: &[DVector<T>]) -> T {
    p.iter().fold(T::zero(), |acc, pk| acc + pk.norm_squared()).sqrt()
}

/// `int_Omega p`.
pub fn pressure_mean<T: Real>(elements: &[LocalElement<T>], p: &[DVector<T>]) -> T {
    elements.iter().zip(p).fold(T::zero(), |acc, (el, pk)| acc + pk[0] * el.ctx.area.sqrt())
}

/// Global interpolant of `u`: the local DoFs of each cell scattered into the velocity slots.
/// Slots shared by neighbouring cells receive the same value from each of them.
pub fn interpolate_global<T: Real>(
    elements: &[LocalElement<T>],
    map: &GlobalDofMap,
    u: impl Fn(&Point2<T>) -> Vector2<T> + Sync,
) -> DVector<T> {
    let local: Vec<DVector<T>> = elements.par_iter().map(|el| crate::element::interpolate(el, &u)).collect();
    let mut out = DVector::zeros(map.n_slots());
    for (c, dofs) in local.iter().enumerate() {
        for (i, &s) in map.cell_slots[c].iter().enumerate() {
            out[s] = dofs[i];
        }
    }
    out
}

/// Orthonormal pressure coefficients of `p` on every cell.
pub fn interpolate_pressure_global<T: Real>(
    elements: &[LocalElement<T>],
    p: impl Fn(&Point2<T>) -> T + Sync,
) -> Vec<DVector<T>> {
    elements.par_iter().map(|el| crate::element::interpolate_pressure(el, &p)).collect()
}

/// Removes the mean of a piecewise pressure given by orthonormal coefficients.
pub fn subtract_mean<T: Real>(elements: &[LocalElement<T>], p: &mut [DVector<T>]) {
    let total: T = elements.iter().fold(T::zero(), |acc, el| acc + el.ctx.area);
    let mean = pressure_mean(elements, p) / total;
    for (el, pk) in elements.iter().zip(p.iter_mut()) {
        pk[0] -= mean * el.ctx.area.sqrt();
    }
}

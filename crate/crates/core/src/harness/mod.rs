//! Convergence, equivalence and DoF-saving experiments on the unit square.

mod cases;
mod output;

pub use cases::{Poly, ScalarFn, TestCase, VectorFn};
pub use output::{emit_outputs, write_dof_table, PLOT_COLUMNS};

use crate::element::ElementKind;
use crate::mesh::{generate_crisscross_grid, generate_quad_grid, generate_triangle_grid, generate_voronoi, read_mesh, PolyMesh, VoronoiOptions};
use crate::polybasis::SplitMode;
use crate::system::{
    assemble, divergence_report, energy_seminorm, interpolate_global, interpolate_pressure_global,
    postprocess_pressure, pressure_l2, pressure_mean, solve, subtract_mean, SaddleSystem, Scheme, SlotKind,
    StokesProblem,
};
use crate::{Error, Real, Result};
use nalgebra::DVector;
use serde::Serialize;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Mesh family of the unit square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// Lloyd-relaxed Voronoi tessellation with `round(1 / h^2)` seeds.
    Voronoi,
    /// `n x n` squares split into four triangles through their centres, `n = round(1 / h)`.
    Triangle,
    /// `n x n` squares split along one diagonal.
    Diagonal,
    /// `n x n` squares.
    Quad,
    File(PathBuf),
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Voronoi => "V",
            Family::Triangle => "T",
            Family::Diagonal => "D",
            Family::Quad => "Q",
            Family::File(_) => "file",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::File(p) => write!(f, "file:{}", p.display()),
            other => f.write_str(other.label()),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "V" | "v" => Ok(Family::Voronoi),
            "T" | "t" => Ok(Family::Triangle),
            "D" | "d" => Ok(Family::Diagonal),
            "Q" | "q" => Ok(Family::Quad),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Family::File(path.into())),
                _ => Err(Error::Config(format!("unknown mesh family '{s}' (expected V, T, D, Q or file:PATH)"))),
            },
        }
    }
}

fn grid_size(h: f64) -> Result<usize> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::InvalidParameter(format!("mesh size h = {h} outside (0, 1]")));
    }
    Ok((1.0 / h).round().max(1.0) as usize)
}

/// Builds the member of `family` with nominal size `h`; `h` is ignored for files.
pub fn build_mesh<T: Real>(family: &Family, h: f64, seed: u64, lloyd_iters: usize) -> Result<PolyMesh<T>> {
    match family {
        Family::Quad => generate_quad_grid(grid_size(h)?),
        Family::Triangle => generate_crisscross_grid(grid_size(h)?),
        Family::Diagonal => generate_triangle_grid(grid_size(h)?),
        Family::Voronoi => {
            let n = grid_size(h)?;
            generate_voronoi(VoronoiOptions { n_seeds: n * n, lloyd_iters, rng_seed: seed })
        }
        Family::File(path) => read_mesh(path),
    }
}

/// Which discrete problem is solved and how the pressure is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemeChoice {
    Full,
    /// Piecewise constant pressure only.
    Reduced,
    /// Reduced solve followed by the cell-wise pressure recovery.
    #[default]
    ReducedPost,
}

impl SchemeChoice {
    pub fn label(self) -> &'static str {
        match self {
            SchemeChoice::Full => "full",
            SchemeChoice::Reduced => "reduced",
            SchemeChoice::ReducedPost => "reduced-post",
        }
    }

    fn scheme(self) -> Scheme {
        match self {
            SchemeChoice::Full => Scheme::Full,
            _ => Scheme::Reduced,
        }
    }
}

impl FromStr for SchemeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SchemeChoice::Full),
            "reduced" => Ok(SchemeChoice::Reduced),
            "reduced-post" => Ok(SchemeChoice::ReducedPost),
            _ => Err(Error::Config(format!("unknown scheme '{s}' (expected full, reduced or reduced-post)"))),
        }
    }
}

pub fn parse_element(s: &str) -> Result<ElementKind> {
    match s {
        "new" => Ok(ElementKind::DivFree),
        "classic" => Ok(ElementKind::Classic),
        _ => Err(Error::Config(format!("unknown element '{s}' (expected new or classic)"))),
    }
}

pub fn element_label(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::DivFree => "new",
        ElementKind::Classic => "classic",
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: Family,
    pub hs: Vec<f64>,
    pub ks: Vec<usize>,
    pub element: ElementKind,
    pub scheme: SchemeChoice,
    pub split: SplitMode,
    pub seed: u64,
    pub lloyd_iters: usize,
    pub nu: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::Quad,
            hs: vec![0.25, 0.125, 0.0625, 0.03125],
            ks: vec![2, 3],
            element: ElementKind::DivFree,
            scheme: SchemeChoice::ReducedPost,
            split: SplitMode::Rotational,
            seed: 1,
            lloyd_iters: 100,
            nu: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.ks.iter().find(|k| **k < 2) {
            return Err(Error::UnsupportedDegree(*k));
        }
        if self.ks.is_empty() || (self.hs.is_empty() && !matches!(self.family, Family::File(_))) {
            return Err(Error::Config("empty h or k list".into()));
        }
        if self.element == ElementKind::Classic && self.scheme != SchemeChoice::Full {
            return Err(Error::Config("the classic element only has the full scheme".into()));
        }
        if !(self.nu > 0.0) {
            return Err(Error::InvalidParameter(format!("viscosity {} must be positive", self.nu)));
        }
        for h in &self.hs {
            grid_size(*h)?;
        }
        Ok(())
    }

    /// Mesh sizes actually run: the nominal list, or the single file mesh.
    fn mesh_sizes(&self) -> Vec<f64> {
        match self.family {
            Family::File(_) => vec![f64::NAN],
            _ => self.hs.clone(),
        }
    }

    pub fn scheme_label(&self) -> String {
        match self.element {
            ElementKind::Classic => "classic-full".into(),
            ElementKind::DivFree => format!("new-{}", self.scheme.label()),
        }
    }
}

/// Errors of one solve against the interpolant of the exact solution.
#[derive(Debug, Clone)]
pub struct CaseResult {
    /// Velocity and pressure unknowns.
    pub ndof: usize,
    pub delta_u: f64,
    pub delta_p: f64,
    /// `max_K ||div u_h||_{L2(K)}`.
    pub max_div: f64,
    /// `|u_h|_{1,h}`.
    pub energy: f64,
    pub residual: f64,
    pub pressure_mean: f64,
}

impl CaseResult {
    /// `max_K ||div u_h||_{L2(K)} / |u_h|_{1,h}`, or the plain maximum for a zero solution.
    pub fn relative_divergence(&self) -> f64 {
        if self.energy > 0.0 {
            self.max_div / self.energy
        } else {
            self.max_div
        }
    }
}

fn problem<'a, T: Real>(
    mesh: &'a PolyMesh<T>,
    k: usize,
    kind: ElementKind,
    split: SplitMode,
    case: &'a TestCase<T>,
) -> StokesProblem<'a, T> {
    let mut pb = StokesProblem::new(mesh, k, &*case.force, &*case.velocity);
    pb.kind = kind;
    pb.mode = split;
    pb.nu = vec![case.nu; mesh.n_cells()];
    pb
}

fn zero_divergence_slots<T: Real>(system: &SaddleSystem<T>, v: &mut DVector<T>) {
    for (s, kind) in system.map.slot_kind.iter().enumerate() {
        if *kind == SlotKind::Divergence {
            v[s] = T::zero();
        }
    }
}

/// Solves `case` on `mesh` and measures `delta(u)`, `delta(p)` and the divergence.
pub fn solve_case<T: Real>(
    mesh: &PolyMesh<T>,
    k: usize,
    kind: ElementKind,
    choice: SchemeChoice,
    split: SplitMode,
    case: &TestCase<T>,
) -> Result<CaseResult> {
    if kind == ElementKind::Classic && choice != SchemeChoice::Full {
        return Err(Error::Config("the classic element only has the full scheme".into()));
    }
    let system = assemble(&problem(mesh, k, kind, split, case), choice.scheme())?;
    let mut sol = solve(&system)?;
    if choice == SchemeChoice::ReducedPost {
        postprocess_pressure(&system, &mut sol)?;
    }
    let els = &system.elements;
    let mut ui = interpolate_global(els, &system.map, &*case.velocity);
    if choice != SchemeChoice::Full {
        zero_divergence_slots(&system, &mut ui);
    }
    let mut pi = interpolate_pressure_global(els, &*case.pressure);
    subtract_mean(els, &mut pi);
    if choice == SchemeChoice::Reduced {
        for pk in pi.iter_mut() {
            pk.rows_mut(1, pk.len() - 1).fill(T::zero());
        }
    }
    let err_u = energy_seminorm(els, &system.map, &(&ui - &sol.velocity)).to_f64_lossy();
    let norm_u = energy_seminorm(els, &system.map, &ui).to_f64_lossy();
    let diff_p: Vec<DVector<T>> = pi.iter().zip(&sol.pressure).map(|(a, b)| a - b).collect();
    let err_p = pressure_l2(&diff_p).to_f64_lossy();
    let norm_p = pressure_l2(&pi).to_f64_lossy();
    let ratio = |e: f64, n: f64| if n > 0.0 { e / n } else { e };
    Ok(CaseResult {
        ndof: system.n_dof(),
        delta_u: ratio(err_u, norm_u),
        delta_p: ratio(err_p, norm_p),
        max_div: divergence_report(&system, &sol).iter().map(|d| d.to_f64_lossy()).fold(0.0, f64::max),
        energy: energy_seminorm(els, &system.map, &sol.velocity).to_f64_lossy(),
        residual: sol.residual,
        pressure_mean: pressure_mean(els, &sol.pressure).to_f64_lossy(),
    })
}

/// Discrepancy between the full and the reduced solution on one mesh.
#[derive(Debug, Clone)]
pub struct Equivalence {
    pub ndof_full: usize,
    pub ndof_reduced: usize,
    pub eps_u: f64,
    pub eps_p: f64,
    /// Largest divergence moment of the full solution.
    pub full_div_moment: f64,
}

pub fn equivalence<T: Real>(mesh: &PolyMesh<T>, k: usize, split: SplitMode, case: &TestCase<T>) -> Result<Equivalence> {
    let full = assemble(&problem(mesh, k, ElementKind::DivFree, split, case), Scheme::Full)?;
    let sol = solve(&full)?;
    let red = full.reduced()?;
    let rsol = solve(&red)?;
    // the reduced interpolant keeps every DoF except the divergence moments
    let mut projected = sol.velocity.clone();
    let mut full_div_moment = 0.0f64;
    for (s, kind) in full.map.slot_kind.iter().enumerate() {
        if *kind == SlotKind::Divergence {
            full_div_moment = full_div_moment.max(projected[s].to_f64_lossy().abs());
        }
    }
    zero_divergence_slots(&full, &mut projected);
    let eps_u = energy_seminorm(&full.elements, &full.map, &(&projected - &rsol.velocity)).to_f64_lossy();
    let eps_p = sol
        .pressure
        .iter()
        .zip(&rsol.pressure)
        .map(|(a, b)| (a[0] - b[0]).to_f64_lossy().powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(Equivalence { ndof_full: full.n_dof(), ndof_reduced: red.n_dof(), eps_u, eps_p, full_div_moment })
}

/// Least-squares slope of `log e` against `log h`.
pub fn fit_slope(hs: &[f64], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        hs.iter().zip(errors).filter(|(h, e)| **h > 0.0 && **e > 0.0).map(|(h, e)| (h.ln(), e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One line of the results table. Unused measures stay empty.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportRow {
    pub family: String,
    pub h: f64,
    pub k: usize,
    pub scheme: String,
    pub ndof: usize,
    pub delta_u: Option<f64>,
    pub delta_p: Option<f64>,
    pub eps_u: Option<f64>,
    pub eps_p: Option<f64>,
    /// `max_K ||div u_h||_{L2(K)} / |u_h|_{1,h}`.
    pub maxdiv: Option<f64>,
    pub slope_u: Option<f64>,
    pub slope_p: Option<f64>,
}

fn with_context(config: &ExperimentConfig, h: f64, k: usize) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Solve { context: format!("family {} h = {h} k = {k}", config.family), source: Box::new(e) }
}

fn mesh_h<T: Real>(h: f64, mesh: &PolyMesh<T>) -> f64 {
    if h.is_nan() {
        mesh.h().to_f64_lossy()
    } else {
        h
    }
}

/// `delta(u)`, `delta(p)` for every `(k, h)` of the configuration, with slopes per `k`.
pub fn run_convergence<T: Real>(config: &ExperimentConfig, case: &TestCase<T>) -> Result<Vec<ReportRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for &k in &config.ks {
        let start = rows.len();
        for h in config.mesh_sizes() {
            let mesh = build_mesh::<T>(&config.family, h, config.seed, config.lloyd_iters)?;
            let h = mesh_h(h, &mesh);
            let t0 = std::time::Instant::now();
            let r = solve_case(&mesh, k, config.element, config.scheme, config.split, case)
                .map_err(with_context(config, h, k))?;
            log::info!(
                "{} {} h={h} k={k}: ndof={} delta_u={:.3e} delta_p={:.3e} ({:.2?})",
                case.name,
                config.family,
                r.ndof,
                r.delta_u,
                r.delta_p,
                t0.elapsed()
            );
            rows.push(ReportRow {
                family: config.family.label().into(),
                h,
                k,
                scheme: config.scheme_label(),
                ndof: r.ndof,
                delta_u: Some(r.delta_u),
                delta_p: Some(r.delta_p),
                eps_u: None,
                eps_p: None,
                maxdiv: Some(r.relative_divergence()),
                slope_u: None,
                slope_p: None,
            });
        }
        let series = &mut rows[start..];
        let hs: Vec<f64> = series.iter().map(|r| r.h).collect();
        let du: Vec<f64> = series.iter().filter_map(|r| r.delta_u).collect();
        let dp: Vec<f64> = series.iter().filter_map(|r| r.delta_p).collect();
        let (su, sp) = (fit_slope(&hs, &du), fit_slope(&hs, &dp));
        for r in series.iter_mut() {
            r.slope_u = su;
            r.slope_p = sp;
        }
    }
    Ok(rows)
}

/// `eps(u)`, `eps(p)` between the full and reduced schemes for every `(k, h)`.
pub fn run_equivalence<T: Real>(config: &ExperimentConfig, case: &TestCase<T>) -> Result<Vec<ReportRow>> {
    config.validate()?;
    if config.element != ElementKind::DivFree {
        return Err(Error::Config("equivalence needs the divergence-free element".into()));
    }
    let mut rows = Vec::new();
    for &k in &config.ks {
        for h in config.mesh_sizes() {
            let mesh = build_mesh::<T>(&config.family, h, config.seed, config.lloyd_iters)?;
            let h = mesh_h(h, &mesh);
            let e = equivalence(&mesh, k, config.split, case).map_err(with_context(config, h, k))?;
            log::info!("{} {} h={h} k={k}: eps_u={:.3e} eps_p={:.3e}", case.name, config.family, e.eps_u, e.eps_p);
            rows.push(ReportRow {
                family: config.family.label().into(),
                h,
                k,
                scheme: "new-full-vs-reduced".into(),
                ndof: e.ndof_full,
                delta_u: None,
                delta_p: None,
                eps_u: Some(e.eps_u),
                eps_p: Some(e.eps_p),
                maxdiv: None,
                slope_u: None,
                slope_p: None,
            });
        }
    }
    Ok(rows)
}

/// Size of the reduction for one mesh and degree.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DofRow {
    pub family: String,
    pub h: f64,
    pub k: usize,
    pub n_cells: usize,
    pub dim_v: usize,
    pub dim_q: usize,
    pub dim_v_reduced: usize,
    pub dim_q_reduced: usize,
    pub saving: usize,
    /// Saving over `dim V_h + dim Q_h` with the zero-mean constraint counted.
    pub percent_constrained: f64,
    /// Saving over `dim V_h + dim Q_h + 1`, every cell carrying its full pressure space.
    pub percent_unconstrained: f64,
}

pub fn dof_saving_table(config: &ExperimentConfig) -> Result<Vec<DofRow>> {
    config.validate()?;
    let mut rows = Vec::new();
    for h in config.mesh_sizes() {
        let mesh = build_mesh::<f64>(&config.family, h, config.seed, config.lloyd_iters)?;
        let h = mesh_h(h, &mesh);
        for &k in &config.ks {
            let map = crate::system::number_dofs(&mesh, k, ElementKind::DivFree)?;
            let total = map.dim_v() + map.dim_q();
            let saving = map.reduction_saving();
            rows.push(DofRow {
                family: config.family.label().into(),
                h,
                k,
                n_cells: mesh.n_cells(),
                dim_v: map.dim_v(),
                dim_q: map.dim_q(),
                dim_v_reduced: map.dim_v_reduced(),
                dim_q_reduced: map.dim_q_reduced(),
                saving,
                percent_constrained: 100.0 * saving as f64 / total as f64,
                percent_unconstrained: 100.0 * saving as f64 / (total + 1) as f64,
            });
        }
    }
    Ok(rows)
}

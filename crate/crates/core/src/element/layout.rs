use crate::polybasis::n_mono;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElementKind {
    /// Divergence-free element: complement moments plus divergence moments inside.
    #[default]
    DivFree,
    /// Laplace-type element with full `[P_{k-2}]^2` moments inside.
    Classic,
}

/// Local degrees of freedom, ordered vertex values, edge values, inner moments,
/// divergence moments. Every vertex and edge node carries an x then a y entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLayout {
    pub kind: ElementKind,
    pub k: usize,
    pub n_k: usize,
    pub n_vert: usize,
    pub n_edge: usize,
    /// Inner moments: complement moments for `DivFree`, all of `[P_{k-2}]^2` for `Classic`.
    pub n_gperp: usize,
    pub n_div: usize,
}

impl DofLayout {
    pub fn new(kind: ElementKind, k: usize, n_k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::UnsupportedDegree(k));
        }
        if n_k < 3 {
            return Err(Error::InvalidParameter(format!("a cell needs at least 3 edges, got {n_k}")));
        }
        let (n_gperp, n_div) = match kind {
            ElementKind::DivFree => ((k - 1) * (k - 2) / 2, n_mono(k - 1) - 1),
            ElementKind::Classic => (k * (k - 1), 0),
        };
        Ok(Self { kind, k, n_k, n_vert: 2 * n_k, n_edge: 2 * n_k * (k - 1), n_gperp, n_div })
    }

    pub fn total(&self) -> usize {
        self.n_vert + self.n_edge + self.n_gperp + self.n_div
    }

    pub fn n_boundary(&self) -> usize {
        self.n_vert + self.n_edge
    }

    pub fn offset_gperp(&self) -> usize {
        self.n_vert + self.n_edge
    }

    pub fn offset_div(&self) -> usize {
        self.offset_gperp() + self.n_gperp
    }

    /// Local index of component `c` at Gauss-Lobatto node `t` (0..=k) of local edge `e`.
    pub fn boundary_dof(&self, e: usize, t: usize, c: usize) -> usize {
        let k = self.k;
        if t == 0 {
            2 * e + c
        } else if t == k {
            2 * ((e + 1) % self.n_k) + c
        } else {
            self.n_vert + 2 * ((k - 1) * e + t - 1) + c
        }
    }
}

/// Layout of the divergence-free element.
pub fn dof_layout(k: usize, n_k: usize) -> Result<DofLayout> {
    DofLayout::new(ElementKind::DivFree, k, n_k)
}

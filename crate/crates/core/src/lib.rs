//! Divergence-free virtual elements for the Stokes problem on polygonal meshes.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`]: polygonal meshes, structured and Voronoi generators, geometry checks and a
//!   plain-text file format.
//! * [`polybasis`]: scaled monomials, polygon/edge quadrature, mass matrices and the
//!   gradient/complement splitting of vector polynomials.
//! * [`element`]: local virtual element matrices for the divergence-free element and the
//!   classical Laplace-type element.
//! * [`system`]: global numbering, saddle-point assembly, the reduced scheme and pressure
//!   recovery.
//! * [`harness`]: manufactured solutions and the convergence/equivalence experiments.
//!
//! All numerical code is generic over the scalar type through [`Real`]; the aliases at the
//! crate root fix it to `f64`, which is what every tolerance in the test suite assumes.

pub mod element;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod mesh;
pub mod polybasis;
pub mod system;

pub use error::{Error, Result};

use std::fmt::{Debug, Display};

/// Floating point scalar usable throughout the crate (`f32` or `f64`).
pub trait Real:
    nalgebra::RealField
    + Copy
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; exact for every constant used in this crate.
    fn lit(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("finite literal")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::lit(n as f64)
    }

    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Point = mesh::Point2<f64>;
pub type Mesh = mesh::PolyMesh<f64>;
pub type Mesh32 = mesh::PolyMesh<f32>;
pub type CellContext = polybasis::CellContext<f64>;
pub type Element = element::LocalElement<f64>;
pub type DofMap = system::GlobalDofMap;
pub type Saddle = system::SaddleSystem<f64>;
pub type StokesSolution = system::Solution<f64>;

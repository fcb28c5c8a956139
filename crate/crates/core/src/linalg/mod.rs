//! Sparse matrices and the direct solver for the saddle-point systems.
//!
//! Matrices are assembled from triplets (duplicates are summed) and factorized with a
//! sparse LU with partial pivoting, followed by a few steps of iterative refinement. The
//! factorization always runs in `f64`.

use crate::{Error, Real, Result};
use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DVector;

#[derive(Debug, Clone, Default)]
pub struct Triplets {
    pub nrows: usize,
    pub ncols: usize,
    entries: Vec<Triplet<usize, usize, f64>>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn push<T: Real>(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.nrows && j < self.ncols);
        let v = v.to_f64_lossy();
        if v != 0.0 {
            self.entries.push(Triplet::new(i, j, v));
        }
    }

    pub fn extend(&mut self, other: Triplets) {
        self.entries.extend(other.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(&self) -> Result<SparseMatrix> {
        let m = SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &self.entries)
            .map_err(|e| Error::Internal(format!("sparse matrix creation failed: {e:?}")))?;
        Ok(SparseMatrix { inner: m })
    }
}

/// Compressed sparse column matrix.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    inner: SparseColMat<usize, f64>,
}

impl SparseMatrix {
    pub fn nrows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn nnz(&self) -> usize {
        self.inner.compute_nnz()
    }

    /// Iterates over stored `(row, col, value)` entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let sym = self.inner.symbolic();
        let vals = self.inner.val();
        let col_ptr = sym.col_ptr();
        let row_idx = sym.row_idx();
        (0..self.ncols()).flat_map(move |j| (col_ptr[j]..col_ptr[j + 1]).map(move |p| (row_idx[p], j, vals[p])))
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.nrows());
        for (i, j, v) in self.entries() {
            y[i] += v * x[j];
        }
        y
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut map = std::collections::HashMap::new();
        for (i, j, v) in self.entries() {
            *map.entry((i, j)).or_insert(0.0) += v;
        }
        map.iter().map(|(&(i, j), &v)| (v - map.get(&(j, i)).copied().unwrap_or(0.0)).abs()).fold(0.0, f64::max)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries().filter(|&(r, c, _)| r == i && c == j).map(|(_, _, v)| v).sum()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(self.nrows(), self.ncols());
        for (i, j, v) in self.entries() {
            d[(i, j)] += v;
        }
        d
    }

    pub fn lu(&self) -> Result<SparseLu> {
        if self.nrows() != self.ncols() {
            return Err(Error::InvalidParameter("LU needs a square matrix".into()));
        }
        let lu = self.inner.sp_lu().map_err(|e| Error::Singular(format!("sparse LU failed: {e:?}")))?;
        Ok(SparseLu { lu, matrix: self.clone() })
    }
}

pub struct SparseLu {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    matrix: SparseMatrix,
}

/// Outcome of a refined solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x: DVector<f64>,
    /// `||A x - b|| / ||b||` (absolute residual when `b = 0`).
    pub relative_residual: f64,
    pub refinement_steps: usize,
}

const MAX_REFINEMENT: usize = 5;

impl SparseLu {
    fn raw_solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let rhs = faer::Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        DVector::from_fn(b.len(), |i, _| x[(i, 0)])
    }

    /// Solves `A x = b`, refining until the relative residual reaches `tol`.
    pub fn solve(&self, b: &DVector<f64>, tol: f64) -> Result<SolveReport> {
        let bnorm = b.norm();
        let denom = if bnorm > 0.0 { bnorm } else { 1.0 };
        let mut x = self.raw_solve(b);
        let mut res = b - self.matrix.mul_vec(&x);
        let mut rel = res.norm() / denom;
        let mut steps = 0;
        while rel > tol && steps < MAX_REFINEMENT {
            x += self.raw_solve(&res);
            res = b - self.matrix.mul_vec(&x);
            let next = res.norm() / denom;
            steps += 1;
            if !(next < rel) {
                rel = next;
                break;
            }
            rel = next;
        }
        if !rel.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("solution is not finite".into()));
        }
        Ok(SolveReport { x, relative_residual: rel, refinement_steps: steps })
    }
}

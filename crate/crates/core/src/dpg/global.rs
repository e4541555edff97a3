//! Global skeleton system: assembly of condensed element contributions and
//! the sparse symmetric solve.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{MatMut, Side};

use super::condense::CondensedElement;
use super::layout::{SkeletonCounts, SkeletonNumbering};
use crate::error::{DpgError, Result};

/// Sparse symmetric matrix over skeleton unknowns (both triangles stored,
/// compressed sparse columns with sorted row indices) and its right-hand
/// side. Clamped `ŵ`, `ψ̂` unknowns are already eliminated.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
    pub rhs: Vec<f64>,
    pub counts: SkeletonCounts,
}

impl GlobalSystem {
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for c in 0..self.n {
            let xc = x[c];
            if xc == 0.0 {
                continue;
            }
            for idx in self.col_ptr[c]..self.col_ptr[c + 1] {
                y[self.row_idx[idx]] += self.values[idx] * xc;
            }
        }
        y
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let rows = &self.row_idx[self.col_ptr[col]..self.col_ptr[col + 1]];
        match rows.binary_search(&row) {
            Ok(i) => self.values[self.col_ptr[col] + i],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `max |A - Aᵀ|` over the stored pattern.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for c in 0..self.n {
            for idx in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[idx];
                worst = worst.max((self.values[idx] - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// `‖A x − b‖ / ‖b‖` (or the absolute residual when `b = 0`).
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let ax = self.matvec(x);
        let res: f64 = ax.iter().zip(&self.rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let nb = norm(&self.rhs);
        if nb > 0.0 {
            res / nb
        } else {
            res
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for c in 0..self.n {
            for idx in self.col_ptr[c]..self.col_ptr[c + 1] {
                m[(self.row_idx[idx], c)] = self.values[idx];
            }
        }
        m
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let symbolic = SymbolicSparseColMat::new_checked(self.n, self.n, self.col_ptr.clone(), None, self.row_idx.clone());
        Ok(SparseColMat::new(symbolic, self.values.clone()))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Scatters the condensed element matrices into the global skeleton system.
pub fn assemble_global(numbering: &SkeletonNumbering, condensed: &[CondensedElement]) -> Result<GlobalSystem> {
    let n = numbering.n_dofs();
    let mut rhs = vec![0.0; n];
    let mut triplets: Vec<(u32, u32, f64)> = Vec::new();
    let per_elem = numbering.layout.n_trace().pow(2);
    triplets.reserve(per_elem * condensed.len());

    for (e, ce) in condensed.iter().enumerate() {
        let dofs = &numbering.element_dofs[e];
        let mut seen = std::collections::HashSet::with_capacity(dofs.len());
        for d in dofs.iter().flatten() {
            if *d >= n {
                return Err(DpgError::IndexOutOfRange { index: *d, size: n });
            }
            if !seen.insert(*d) {
                return Err(DpgError::InvalidDiscretization(format!(
                    "element {e} maps two trace columns to global unknown {d}"
                )));
            }
        }
        for (j, dj) in dofs.iter().enumerate() {
            let Some(cj) = *dj else { continue };
            rhs[cj] += ce.rhs[j];
            for (i, di) in dofs.iter().enumerate() {
                let Some(ri) = *di else { continue };
                triplets.push((cj as u32, ri as u32, ce.schur[(i, j)]));
            }
        }
    }

    triplets.sort_unstable_by_key(|&(c, r, _)| (c, r));
    let mut col_ptr = vec![0usize; n + 1];
    let mut row_idx = Vec::with_capacity(triplets.len() / 2);
    let mut values: Vec<f64> = Vec::with_capacity(triplets.len() / 2);
    let mut last: Option<(u32, u32)> = None;
    for (c, r, v) in triplets {
        if last == Some((c, r)) {
            *values.last_mut().expect("merged entry") += v;
        } else {
            row_idx.push(r as usize);
            values.push(v);
            col_ptr[c as usize + 1] += 1;
            last = Some((c, r));
        }
    }
    for c in 0..n {
        col_ptr[c + 1] += col_ptr[c];
    }
    Ok(GlobalSystem {
        n,
        col_ptr,
        row_idx,
        values,
        rhs,
        counts: numbering.counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LinearSolver {
    /// Sparse supernodal Cholesky with fill-reducing ordering.
    #[default]
    Cholesky,
    /// Jacobi-preconditioned conjugate gradients.
    ConjugateGradient { tolerance: f64, max_iterations: usize },
}

impl LinearSolver {
    pub fn cg() -> Self {
        Self::ConjugateGradient {
            tolerance: 1e-12,
            max_iterations: 100_000,
        }
    }
}

pub fn solve_global(sys: &GlobalSystem, solver: LinearSolver) -> Result<Vec<f64>> {
    factor_global(sys, solver)?.solve(sys, &sys.rhs)
}

/// A reusable solver for one global matrix.
pub enum GlobalFactor {
    Cholesky(Llt<usize, f64>),
    ConjugateGradient { tolerance: f64, max_iterations: usize },
}

impl std::fmt::Debug for GlobalFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GlobalFactor::Cholesky(_) => f.write_str("GlobalFactor::Cholesky"),
            GlobalFactor::ConjugateGradient { tolerance, max_iterations } => f
                .debug_struct("GlobalFactor::ConjugateGradient")
                .field("tolerance", tolerance)
                .field("max_iterations", max_iterations)
                .finish(),
        }
    }
}

pub fn factor_global(sys: &GlobalSystem, solver: LinearSolver) -> Result<GlobalFactor> {
    match solver {
        LinearSolver::Cholesky if sys.n > 0 => {
            let llt = sys
                .to_faer()?
                .sp_cholesky(Side::Lower)
                .map_err(|e| DpgError::Factorization(format!("{e:?}")))?;
            Ok(GlobalFactor::Cholesky(llt))
        }
        LinearSolver::Cholesky => Ok(GlobalFactor::ConjugateGradient {
            tolerance: 0.0,
            max_iterations: 0,
        }),
        LinearSolver::ConjugateGradient {
            tolerance,
            max_iterations,
        } => Ok(GlobalFactor::ConjugateGradient {
            tolerance,
            max_iterations,
        }),
    }
}

impl GlobalFactor {
    /// Solves `A x = rhs` for the matrix this was built from.
    pub fn solve(&self, sys: &GlobalSystem, rhs: &[f64]) -> Result<Vec<f64>> {
        if sys.n == 0 {
            return Ok(Vec::new());
        }
        let x = match self {
            GlobalFactor::Cholesky(llt) => {
                let mut x = rhs.to_vec();
                llt.solve_in_place(MatMut::from_column_major_slice_mut(&mut x, sys.n, 1));
                // two steps of iterative refinement
                for _ in 0..2 {
                    let ax = sys.matvec(&x);
                    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
                    llt.solve_in_place(MatMut::from_column_major_slice_mut(&mut r, sys.n, 1));
                    for (xi, di) in x.iter_mut().zip(&r) {
                        *xi += di;
                    }
                }
                x
            }
            GlobalFactor::ConjugateGradient {
                tolerance,
                max_iterations,
            } => solve_cg(sys, rhs, *tolerance, *max_iterations)?,
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(DpgError::Factorization("non-finite solution".into()));
        }
        Ok(x)
    }
}

fn solve_cg(sys: &GlobalSystem, rhs: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = sys.n;
    let inv_diag: Vec<f64> = sys
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let nb = norm(rhs);
    let mut x = vec![0.0; n];
    if nb == 0.0 {
        return Ok(x);
    }
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 0..max_iter {
        let ap = sys.matvec(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(DpgError::Factorization("matrix is not positive definite".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = norm(&r) / nb;
        if rel < tol {
            return Ok(x);
        }
        if it + 1 == max_iter {
            return Err(DpgError::NoConvergence {
                residual: rel,
                iterations: max_iter,
            });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(DpgError::NoConvergence {
        residual: norm(&r) / nb,
        iterations: max_iter,
    })
}

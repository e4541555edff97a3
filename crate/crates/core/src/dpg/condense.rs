//! Optimal test functions, local normal equations and static condensation.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::element::{ElementSystem, GramFactors};
use crate::error::{DpgError, Result};

/// Local normal equations `N_K = B_Kᵀ G_K⁻¹ B_K`, `g_K = B_Kᵀ G_K⁻¹ l_K`.
///
/// The columns of `G_K⁻¹ B_K` are the coefficients of the optimal test
/// functions of the trial basis.
#[derive(Debug, Clone)]
pub struct NormalEquations {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

pub fn normal_equations(sys: &ElementSystem, factors: &GramFactors) -> NormalEquations {
    let optimal = factors.solve(&sys.test, &sys.b);
    let mut matrix = sys.b.tr_mul(&optimal);
    // exact symmetry; the two triangles differ by rounding only
    let n = matrix.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
            matrix[(i, j)] = avg;
            matrix[(j, i)] = avg;
        }
    }
    let rhs = optimal.tr_mul(&sys.load);
    NormalEquations { matrix, rhs }
}

/// Data needed to recover interior fields from trace values:
/// `u_I = c − K u_T`.
#[derive(Debug, Clone)]
pub struct Recovery {
    pub k: DMatrix<f64>,
    pub c: DVector<f64>,
    /// Upper triangular `R` with `RᵀR = N_II`.
    pub r: DMatrix<f64>,
}

impl Recovery {
    pub fn interior(&self, traces: &DVector<f64>) -> DVector<f64> {
        &self.c - &self.k * traces
    }

    /// Interior part of the solution of `N_K δ = g` once the trace part
    /// `δ_T` is known: `N_II⁻¹ g_I − K δ_T`.
    pub fn interior_correction(&self, g_i: &DVector<f64>, delta_t: &DVector<f64>) -> DVector<f64> {
        let mut y = g_i.clone();
        self.r.tr_solve_upper_triangular_mut(&mut y);
        self.r.solve_upper_triangular_mut(&mut y);
        y - &self.k * delta_t
    }

    /// Trace right-hand side of the condensed system for `N_K δ = g`:
    /// `g_T − Kᵀ g_I`.
    pub fn condensed_rhs(&self, g_i: &DVector<f64>, g_t: &DVector<f64>) -> DVector<f64> {
        g_t - self.k.tr_mul(g_i)
    }
}

/// Schur complement of the local normal equations onto trace unknowns.
#[derive(Debug, Clone)]
pub struct CondensedElement {
    pub schur: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub recovery: Recovery,
}

pub fn condense_normal(ne: &NormalEquations, n_interior: usize, elem: usize) -> Result<CondensedElement> {
    let n = ne.matrix.nrows();
    let nt = n - n_interior;
    let n_ii = ne.matrix.view((0, 0), (n_interior, n_interior)).into_owned();
    let n_it = ne.matrix.view((0, n_interior), (n_interior, nt)).into_owned();
    let n_tt = ne.matrix.view((n_interior, n_interior), (nt, nt));
    let g_i = ne.rhs.rows(0, n_interior).into_owned();
    let g_t = ne.rhs.rows(n_interior, nt);

    let chol = Cholesky::new(n_ii).ok_or(DpgError::SingularInterior { elem })?;
    let k = chol.solve(&n_it);
    let c = chol.solve(&g_i);
    let mut schur = n_tt - n_it.tr_mul(&k);
    for i in 0..nt {
        for j in i + 1..nt {
            let avg = 0.5 * (schur[(i, j)] + schur[(j, i)]);
            schur[(i, j)] = avg;
            schur[(j, i)] = avg;
        }
    }
    let rhs = g_t - n_it.tr_mul(&c);
    Ok(CondensedElement {
        schur,
        rhs,
        recovery: Recovery {
            k,
            c,
            r: chol.l().transpose(),
        },
    })
}

/// Condenses the interior field unknowns of one element onto its traces.
///
/// Works on the whitened system `W = L⁻¹B`, `f = L⁻¹l` (with `G = LLᵀ`):
/// a QR factorization of the interior columns eliminates them without
/// forming `B_Kᵀ G_K⁻¹ B_K`, which would square the condition number. The
/// result agrees with [`condense_normal`] in exact arithmetic.
pub fn condense_element(sys: &ElementSystem, elem: usize) -> Result<CondensedElement> {
    let factors = sys.gram.factor(elem)?;
    condense_whitened(sys, &factors, elem)
}

pub fn condense_whitened(sys: &ElementSystem, factors: &GramFactors, elem: usize) -> Result<CondensedElement> {
    let ni = sys.n_interior();
    let nt = sys.n_trace();
    let w = factors.whiten(&sys.test, &sys.b);
    let f = factors.whiten(&sys.test, &DMatrix::from_column_slice(sys.load.len(), 1, sys.load.as_slice()));
    let m = w.nrows();

    let qr = w.columns(0, ni).into_owned().qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if r.diagonal().iter().any(|d| !(d.abs() > 1e-13 * scale)) {
        return Err(DpgError::SingularInterior { elem });
    }
    let mut rest = DMatrix::zeros(m, nt + 1);
    rest.columns_mut(0, nt).copy_from(&w.columns(ni, nt));
    rest.column_mut(nt).copy_from(&f.column(0));
    qr.q_tr_mul(&mut rest);

    let mut top = rest.rows(0, ni).into_owned();
    if !r.solve_upper_triangular_mut(&mut top) {
        return Err(DpgError::SingularInterior { elem });
    }
    let bottom = rest.rows(ni, m - ni);
    let wt = bottom.columns(0, nt);
    let ft = bottom.column(nt);
    Ok(CondensedElement {
        schur: wt.tr_mul(&wt),
        rhs: wt.tr_mul(&ft),
        recovery: Recovery {
            k: top.columns(0, nt).into_owned(),
            c: top.column(nt).into_owned(),
            r: r.into_owned(),
        },
    })
}

/// `‖G_K^{-1/2} (l_K − B_K u_K)‖`, the local residual in the dual test norm.
pub fn energy_residual(sys: &ElementSystem, factors: &GramFactors, u: &DVector<f64>) -> f64 {
    let res = &sys.load - &sys.b * u;
    let y = factors.solve_vec(&sys.test, &res);
    res.dot(&y).max(0.0).sqrt()
}

//! End-to-end DPG solve on one mesh.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::condense::{condense_element, energy_residual, normal_equations, CondensedElement};
use super::element::{element_system, ElementSystem, Sources};
use super::global::{assemble_global, factor_global, GlobalSystem, LinearSolver};
use super::layout::{SkeletonNumbering, TestLayout, TrialLayout};
use super::tables::ReferenceTables;
use crate::basis::{RtBasis, ScalarBasis};
use crate::error::{DpgError, Result};
use crate::material::{MaterialParams, Tensor2};
use crate::mesh::Mesh;

/// Discretization choices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpgConfig {
    /// Trial degree `p ≥ 1`.
    pub degree: usize,
    /// Test enrichment: test functions have degree `p + enrichment`.
    pub enrichment: usize,
    /// Gauss points per direction; `None` means `p + 5`.
    pub quad_points: Option<usize>,
    pub solver: LinearSolver,
    /// Corrections driven by the residual `Bᵀ G⁻¹ (l − B u)` of the
    /// unsquared element forms. The normal equations square the condition
    /// number, which scales like `t⁻²` through the shear term.
    pub refinement_steps: usize,
}

impl Default for DpgConfig {
    fn default() -> Self {
        Self {
            degree: 1,
            enrichment: 3,
            quad_points: None,
            solver: LinearSolver::Cholesky,
            refinement_steps: 2,
        }
    }
}

impl DpgConfig {
    pub fn with_degree(degree: usize) -> Self {
        Self {
            degree,
            ..Self::default()
        }
    }

    pub fn test_degree(&self) -> usize {
        self.degree + self.enrichment
    }

    pub fn quadrature_points(&self) -> usize {
        self.quad_points.unwrap_or(self.degree + 5)
    }
}


/// Discrete field values at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldValues {
    pub v: [f64; 2],
    pub m: Tensor2,
    pub w: f64,
    pub psi: [f64; 2],
    pub r: f64,
}

/// Coefficients of the discrete solution.
#[derive(Debug, Clone)]
pub struct SolutionFields {
    pub layout: TrialLayout,
    /// Interior field coefficients per element, ordered as [`TrialLayout`].
    pub interior: Vec<DVector<f64>>,
    /// Global skeleton coefficients, ordered as [`SkeletonNumbering`].
    pub skeleton: Vec<f64>,
    scalar: ScalarBasis,
    rt: RtBasis,
}

impl SolutionFields {
    pub fn new(layout: TrialLayout, interior: Vec<DVector<f64>>, skeleton: Vec<f64>) -> Self {
        Self {
            layout,
            interior,
            skeleton,
            scalar: ScalarBasis::new(layout.degree),
            rt: RtBasis::new(layout.degree),
        }
    }

    pub fn zeros(layout: TrialLayout, n_elements: usize, n_skeleton: usize) -> Self {
        Self::new(
            layout,
            vec![DVector::zeros(layout.n_interior()); n_elements],
            vec![0.0; n_skeleton],
        )
    }

    /// Trace coefficients seen by element `e` (clamped entries are zero).
    pub fn element_traces(&self, numbering: &SkeletonNumbering, e: usize) -> DVector<f64> {
        DVector::from_iterator(
            self.layout.n_trace(),
            numbering.element_dofs[e].iter().map(|d| d.map_or(0.0, |i| self.skeleton[i])),
        )
    }

    /// Interior and trace coefficients of element `e` stacked.
    pub fn element_vector(&self, numbering: &SkeletonNumbering, e: usize) -> DVector<f64> {
        let t = self.element_traces(numbering, e);
        let mut u = DVector::zeros(self.layout.n_total());
        u.rows_mut(0, self.layout.n_interior()).copy_from(&self.interior[e]);
        u.rows_mut(self.layout.n_interior(), t.len()).copy_from(&t);
        u
    }

    /// Evaluates all field variables at reference point `p` of element `e`.
    pub fn eval(&self, mesh: &Mesh, e: usize, p: [f64; 2]) -> FieldValues {
        let map = mesh.elements[e].map(p);
        let (sv, _) = self.scalar.eval(p);
        let (vv, _) = self.rt.eval(p);
        let c = &self.interior[e];
        let l = &self.layout;
        let scalar = |off: usize| sv.iter().enumerate().map(|(a, s)| s * c[off + a]).sum::<f64>();
        let vector = |off: usize| {
            let mut acc = [0.0; 2];
            for (a, v) in vv.iter().enumerate() {
                acc[0] += v[0] * c[off + a];
                acc[1] += v[1] * c[off + a];
            }
            map.piola(acc)
        };
        FieldValues {
            v: vector(l.v()),
            m: [vector(l.m(0)), vector(l.m(1))],
            w: scalar(l.w()),
            psi: [scalar(l.psi(0)), scalar(l.psi(1))],
            r: scalar(l.r()),
        }
    }

    /// Evaluates at a physical point, locating the containing element with
    /// tolerance `1e-12` on reference coordinates.
    pub fn eval_at(&self, mesh: &Mesh, x: [f64; 2]) -> Result<FieldValues> {
        let (e, p) = mesh
            .locate(x, 1e-12)
            .ok_or(DpgError::PointLocation { x: x[0], y: x[1] })?;
        Ok(self.eval(mesh, e, p))
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.interior {
            *v *= c;
        }
        for s in &mut out.skeleton {
            *s *= c;
        }
        out
    }
}

/// Result of a solve together with the assembled skeleton system.
#[derive(Debug, Clone)]
pub struct Solution {
    pub fields: SolutionFields,
    pub system: GlobalSystem,
    /// `‖A x − b‖ / ‖b‖` of the skeleton solve.
    pub relative_residual: f64,
}

/// A DPG discretization bound to one mesh and material.
#[derive(Debug)]
pub struct DpgSolver<'m> {
    pub mesh: &'m Mesh,
    pub material: MaterialParams,
    pub config: DpgConfig,
    pub trial: TrialLayout,
    pub test: TestLayout,
    pub tables: ReferenceTables,
    pub numbering: SkeletonNumbering,
}

impl<'m> DpgSolver<'m> {
    pub fn new(mesh: &'m Mesh, material: MaterialParams, config: DpgConfig) -> Result<Self> {
        material.validate()?;
        if config.degree < 1 {
            return Err(DpgError::InvalidDiscretization("trial degree must be at least 1".into()));
        }
        if config.quadrature_points() == 0 {
            return Err(DpgError::InvalidDiscretization("quadrature needs at least one point".into()));
        }
        let trial = TrialLayout::new(config.degree);
        let test = TestLayout::new(config.test_degree());
        let tables = ReferenceTables::new(config.degree, config.test_degree(), config.quadrature_points());
        let numbering = SkeletonNumbering::new(mesh, trial);
        Ok(Self {
            mesh,
            material,
            config,
            trial,
            test,
            tables,
            numbering,
        })
    }

    pub fn element_system(&self, e: usize, sources: &Sources<'_>) -> Result<ElementSystem> {
        element_system(self.mesh, e, &self.trial, &self.test, &self.material, sources, &self.tables)
    }

    /// Condensed contributions of every element, computed in parallel and
    /// returned in element order.
    pub fn condense_all(&self, sources: &Sources<'_>) -> Result<Vec<CondensedElement>> {
        (0..self.mesh.num_elements())
            .into_par_iter()
            .map(|e| {
                let sys = self.element_system(e, sources)?;
                condense_element(&sys, e)
            })
            .collect()
    }

    pub fn assemble(&self, sources: &Sources<'_>) -> Result<(GlobalSystem, Vec<CondensedElement>)> {
        let condensed = self.condense_all(sources)?;
        let system = assemble_global(&self.numbering, &condensed)?;
        Ok((system, condensed))
    }

    pub fn solve(&self, sources: &Sources<'_>) -> Result<Solution> {
        let (system, condensed) = self.assemble(sources)?;
        let factor = factor_global(&system, self.config.solver)?;
        let skeleton = factor.solve(&system, &system.rhs)?;
        let relative_residual = system.relative_residual(&skeleton);
        let mut fields = SolutionFields::zeros(self.trial, self.mesh.num_elements(), system.n);
        fields.skeleton = skeleton;
        let interior: Vec<DVector<f64>> = condensed
            .iter()
            .enumerate()
            .map(|(e, ce)| ce.recovery.interior(&fields.element_traces(&self.numbering, e)))
            .collect();
        fields.interior = interior;

        for _ in 0..self.config.refinement_steps {
            let (g_int, g_skel) = self.normal_residual(&fields, sources)?;
            let mut rhs = g_skel;
            for (e, ce) in condensed.iter().enumerate() {
                let contrib = ce.recovery.k.tr_mul(&g_int[e]);
                for (j, d) in self.numbering.element_dofs[e].iter().enumerate() {
                    if let Some(i) = d {
                        rhs[*i] -= contrib[j];
                    }
                }
            }
            let delta = factor.solve(&system, &rhs)?;
            for (s, d) in fields.skeleton.iter_mut().zip(&delta) {
                *s += d;
            }
            for (e, ce) in condensed.iter().enumerate() {
                let dt = self.gather(&delta, e);
                fields.interior[e] += ce.recovery.interior_correction(&g_int[e], &dt);
            }
        }
        Ok(Solution {
            fields,
            system,
            relative_residual,
        })
    }

    fn gather(&self, global: &[f64], e: usize) -> DVector<f64> {
        DVector::from_iterator(
            self.trial.n_trace(),
            self.numbering.element_dofs[e].iter().map(|d| d.map_or(0.0, |i| global[i])),
        )
    }

    /// `Σ_K B_Kᵀ G_K⁻¹ (l_K − B_K u_K)`: interior parts per element and the
    /// assembled skeleton part over free unknowns.
    pub fn normal_residual(
        &self,
        fields: &SolutionFields,
        sources: &Sources<'_>,
    ) -> Result<(Vec<DVector<f64>>, Vec<f64>)> {
        let n_int = self.trial.n_interior();
        let parts: Vec<DVector<f64>> = (0..self.mesh.num_elements())
            .into_par_iter()
            .map(|e| {
                let sys = self.element_system(e, sources)?;
                let factors = sys.gram.factor(e)?;
                let u = fields.element_vector(&self.numbering, e);
                let res = &sys.load - &sys.b * &u;
                let y = factors.solve_vec(&self.test, &res);
                Ok(sys.b.tr_mul(&y))
            })
            .collect::<Result<_>>()?;
        let mut global = vec![0.0; self.numbering.n_dofs()];
        let mut interior = Vec::with_capacity(parts.len());
        for (e, v) in parts.into_iter().enumerate() {
            for (j, d) in self.numbering.element_dofs[e].iter().enumerate() {
                if let Some(i) = d {
                    global[*i] += v[n_int + j];
                }
            }
            interior.push(v.rows(0, n_int).into_owned());
        }
        Ok((interior, global))
    }

    /// Per-element `‖G_K^{-1/2}(l_K − B_K u_K)‖`.
    pub fn energy_residuals(&self, fields: &SolutionFields, sources: &Sources<'_>) -> Result<Vec<f64>> {
        (0..self.mesh.num_elements())
            .into_par_iter()
            .map(|e| {
                let sys = self.element_system(e, sources)?;
                let factors = sys.gram.factor(e)?;
                Ok(energy_residual(&sys, &factors, &fields.element_vector(&self.numbering, e)))
            })
            .collect()
    }

    /// Max-norm of the assembled residual of the discrete normal equations,
    /// `Σ_K B_Kᵀ G_K⁻¹ (l_K − B_K u_K)`, over interior and free skeleton
    /// unknowns, relative to the same quantity at `u = 0`. Vanishes (up to
    /// rounding) at the DPG solution.
    pub fn galerkin_residual(&self, fields: &SolutionFields, sources: &Sources<'_>) -> Result<f64> {
        let max_abs = |(interior, skeleton): (Vec<DVector<f64>>, Vec<f64>)| {
            let worst = interior.iter().fold(0.0, |a: f64, v| a.max(v.amax()));
            skeleton.iter().fold(worst, |a, v| a.max(v.abs()))
        };
        let res = max_abs(self.normal_residual(fields, sources)?);
        let zero = SolutionFields::zeros(self.trial, self.mesh.num_elements(), self.numbering.n_dofs());
        let reference = max_abs(self.normal_residual(&zero, sources)?);
        Ok(if reference > 0.0 { res / reference } else { res })
    }

    /// Element `L2` mass matrix of the interior trial fields,
    /// `‖V‖² + ‖M‖² + ‖w‖² + ‖ψ‖² + ‖r‖²`.
    pub fn field_mass(&self, e: usize) -> Result<DMatrix<f64>> {
        let maps = super::element::element_maps(self.mesh, e, &self.tables)?;
        let l = &self.trial;
        let (nv, ns) = (l.n_rt(), l.n_scalar());
        let mut rt = DMatrix::<f64>::zeros(nv, nv);
        let mut sc = DMatrix::<f64>::zeros(ns, ns);
        for (k, map) in maps.iter().enumerate() {
            let wk = self.tables.rule.weights[k];
            let jv: Vec<[f64; 2]> = self.tables.trial_rt.values_at(k).iter().map(|v| map.apply(*v)).collect();
            let s = self.tables.trial_scalar.values_at(k);
            for a in 0..nv {
                for b in 0..nv {
                    rt[(a, b)] += wk / map.det * (jv[a][0] * jv[b][0] + jv[a][1] * jv[b][1]);
                }
            }
            for a in 0..ns {
                for b in 0..ns {
                    sc[(a, b)] += wk * map.det * s[a] * s[b];
                }
            }
        }
        let mut m = DMatrix::zeros(l.n_interior(), l.n_interior());
        for off in [l.v(), l.m(0), l.m(1)] {
            m.view_mut((off, off), (nv, nv)).copy_from(&rt);
        }
        for off in [l.w(), l.psi(0), l.psi(1), l.r()] {
            m.view_mut((off, off), (ns, ns)).copy_from(&sc);
        }
        Ok(m)
    }

    /// Discrete inf-sup probe: the square root of the smallest eigenvalue of
    /// the global normal-equation operator, with the trace unknowns
    /// minimized out, relative to the `L2` norm of the field variables.
    ///
    /// Dense; intended for small meshes.
    pub fn infsup_estimate(&self) -> Result<f64> {
        let zero = |_: f64, _: f64| 0.0;
        let sources = Sources::pressure(&zero);
        let n_el = self.mesh.num_elements();
        let n_int = self.trial.n_interior();
        let n_f = n_el * n_int;
        let n_s = self.numbering.n_dofs();
        let blocks: Vec<DMatrix<f64>> = (0..n_el)
            .into_par_iter()
            .map(|e| {
                let sys = self.element_system(e, &sources)?;
                let factors = sys.gram.factor(e)?;
                Ok(normal_equations(&sys, &factors).matrix)
            })
            .collect::<Result<_>>()?;

        // [A_ff A_fs; A_sf A_ss]; A_ff is block diagonal
        let mut a_fs = DMatrix::<f64>::zeros(n_f, n_s);
        let mut a_ss = DMatrix::<f64>::zeros(n_s, n_s);
        let mut a_ff = DMatrix::<f64>::zeros(n_f, n_f);
        for (e, nk) in blocks.iter().enumerate() {
            let off = e * n_int;
            a_ff.view_mut((off, off), (n_int, n_int))
                .copy_from(&nk.view((0, 0), (n_int, n_int)));
            let dofs = &self.numbering.element_dofs[e];
            for (j, dj) in dofs.iter().enumerate() {
                let Some(cj) = *dj else { continue };
                for i in 0..n_int {
                    a_fs[(off + i, cj)] += nk[(i, n_int + j)];
                }
                for (i, di) in dofs.iter().enumerate() {
                    if let Some(ri) = *di {
                        a_ss[(ri, cj)] += nk[(n_int + i, n_int + j)];
                    }
                }
            }
        }
        let schur = if n_s > 0 {
            let chol = nalgebra::Cholesky::new(a_ss)
                .ok_or_else(|| DpgError::Eigen("skeleton block is not positive definite".into()))?;
            let x = chol.solve(&a_fs.transpose());
            a_ff - &a_fs * x
        } else {
            a_ff
        };

        // symmetric reduction with the block-diagonal field mass
        let mut whitened = schur;
        let mut linv_blocks = Vec::with_capacity(n_el);
        for e in 0..n_el {
            let m = self.field_mass(e)?;
            let l = nalgebra::Cholesky::new(m)
                .ok_or_else(|| DpgError::Eigen(format!("field mass of element {e} is singular")))?
                .l();
            let linv = l
                .try_inverse()
                .ok_or_else(|| DpgError::Eigen("mass factor inversion failed".into()))?;
            linv_blocks.push(linv);
        }
        for (e, linv) in linv_blocks.iter().enumerate() {
            let rows = whitened.rows(e * n_int, n_int).into_owned();
            whitened.rows_mut(e * n_int, n_int).copy_from(&(linv * rows));
        }
        for (e, linv) in linv_blocks.iter().enumerate() {
            let cols = whitened.columns(e * n_int, n_int).into_owned();
            whitened.columns_mut(e * n_int, n_int).copy_from(&(cols * linv.transpose()));
        }
        let sym = 0.5 * (&whitened + whitened.transpose());
        let eig = sym.symmetric_eigenvalues();
        let min = eig.min();
        if !min.is_finite() || min <= 0.0 {
            return Err(DpgError::Eigen(format!("smallest eigenvalue {min:e} is not positive")));
        }
        Ok(min.sqrt())
    }
}

//! Convergence studies over a sequence of `N × N` meshes.

use std::fmt::Write as _;

use super::errors::{l2_errors, ErrorReport, Quantity};
use super::exact::ExactSolution;
use crate::dpg::{DpgConfig, DpgSolver, LinearSolver, SolutionFields, Sources};
use crate::error::{DpgError, Result};
use crate::material::MaterialParams;
use crate::mesh::{generate_mesh, Mesh, MeshKind};

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub degree: usize,
    pub material: MaterialParams,
    pub mesh_kind: MeshKind,
    pub distortion: f64,
    /// Strictly increasing element counts per direction.
    pub refinements: Vec<usize>,
    pub solver: LinearSolver,
    pub quad_points: Option<usize>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            degree: 1,
            material: MaterialParams::default(),
            mesh_kind: MeshKind::Uniform,
            distortion: 0.25,
            refinements: vec![4, 8, 16, 32, 64],
            solver: LinearSolver::Cholesky,
            quad_points: None,
        }
    }
}

impl StudyConfig {
    pub fn dpg_config(&self) -> DpgConfig {
        DpgConfig {
            degree: self.degree,
            quad_points: self.quad_points,
            solver: self.solver,
            ..DpgConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        if self.degree < 1 {
            return Err(DpgError::InvalidDiscretization("trial degree must be at least 1".into()));
        }
        if self.refinements.is_empty() {
            return Err(DpgError::InvalidDiscretization("no meshes requested".into()));
        }
        if self.refinements.windows(2).any(|w| w[0] >= w[1]) || self.refinements[0] == 0 {
            return Err(DpgError::InvalidDiscretization(
                "refinements must be positive and strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Solver diagnostics of one mesh in a study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshRun {
    pub n: usize,
    pub skeleton_dofs: usize,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub quantity: Quantity,
    pub n: usize,
    pub h: f64,
    pub abs_error: f64,
    pub rel_error: Option<f64>,
    /// Observed order against the previous (coarser) mesh.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

impl RateTable {
    pub fn from_reports(reports: &[ErrorReport], quantities: &[Quantity]) -> Self {
        let mut rows = Vec::new();
        for &q in quantities {
            for (i, rep) in reports.iter().enumerate() {
                let e = rep.get(q);
                let rate = (i > 0).then(|| {
                    let prev = &reports[i - 1];
                    (prev.get(q).abs_error / e.abs_error).ln() / (prev.h / rep.h).ln()
                });
                rows.push(RateRow {
                    quantity: q,
                    n: rep.n,
                    h: rep.h,
                    abs_error: e.abs_error,
                    rel_error: e.rel_error,
                    rate,
                });
            }
        }
        Self { rows }
    }

    /// Rate of `q` on the finest pair of meshes.
    pub fn finest_rate(&self, q: Quantity) -> Option<f64> {
        self.rows.iter().rev().find(|r| r.quantity == q).and_then(|r| r.rate)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,N,h,abs_error,rel_error,rate\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.quantity,
                r.n,
                r.h,
                r.abs_error,
                opt(r.rel_error),
                opt(r.rate)
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct StudyResult {
    pub reports: Vec<ErrorReport>,
    pub runs: Vec<MeshRun>,
    pub table: RateTable,
    /// Mesh and discrete solution of the finest run.
    pub finest: Option<(Mesh, SolutionFields)>,
}

impl StudyResult {
    /// Human-readable summary of errors and rates.
    pub fn summary(&self, config: &StudyConfig) -> String {
        let mut s = String::new();
        let m = &config.material;
        let _ = writeln!(
            s,
            "degree p = {}, thickness t = {}, poisson = {}, shear correction = {}",
            config.degree, m.thickness, m.poisson, m.shear_correction
        );
        let _ = writeln!(s, "mesh = {}, distortion = {}", config.mesh_kind, config.distortion);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:>5} {:>10} {:>14}", "N", "skeleton", "solve resid");
        for r in &self.runs {
            let _ = writeln!(s, "{:>5} {:>10} {:>14.3e}", r.n, r.skeleton_dofs, r.relative_residual);
        }
        for q in Quantity::REPORTED {
            let _ = writeln!(s);
            let _ = writeln!(s, "{q}: relative L2 error");
            for row in self.table.rows.iter().filter(|r| r.quantity == q) {
                let rel = row.rel_error.map_or("-".to_string(), |v| format!("{v:.4e}"));
                let rate = row.rate.map_or("-".to_string(), |v| format!("{v:.3}"));
                let _ = writeln!(s, "  N = {:>4}  rel = {rel:>11}  rate = {rate}", row.n);
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "r: absolute L2 error (exact r vanishes)");
        for rep in &self.reports {
            let _ = writeln!(s, "  N = {:>4}  abs = {:.4e}", rep.n, rep.get(Quantity::Vorticity).abs_error);
        }
        s
    }
}

/// Solves on every mesh of the study and tabulates errors against `exact`,
/// which supplies the pressure and any moment source.
pub fn convergence_study(config: &StudyConfig, exact: &ExactSolution) -> Result<StudyResult> {
    config.validate()?;
    let pressure = |x: f64, y: f64| exact.pressure_at(x, y);
    let moment = |x: f64, y: f64| exact.moment_source_at(x, y);
    let sources = Sources {
        moment: Some(&moment),
        ..Sources::pressure(&pressure)
    };
    let dpg = config.dpg_config();
    let mut reports = Vec::with_capacity(config.refinements.len());
    let mut runs = Vec::with_capacity(config.refinements.len());
    let mut finest = None;
    for &n in &config.refinements {
        let mesh = generate_mesh(n, config.mesh_kind, config.distortion)?;
        let solver = DpgSolver::new(&mesh, config.material, dpg)?;
        let sol = solver.solve(&sources)?;
        reports.push(l2_errors(&sol.fields, exact, &mesh, dpg.quadrature_points())?);
        runs.push(MeshRun {
            n,
            skeleton_dofs: sol.system.n,
            relative_residual: sol.relative_residual,
        });
        drop(solver);
        finest = Some((mesh, sol.fields));
    }
    let table = RateTable::from_reports(&reports, &Quantity::REPORTED);
    Ok(StudyResult {
        reports,
        runs,
        table,
        finest,
    })
}

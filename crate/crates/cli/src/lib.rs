//! Convergence studies of the clamped square plate benchmark from the
//! command line: configuration, orchestration and output files.

pub mod config;
pub mod fields;
pub mod output;

use std::path::PathBuf;

use dpg_plate::benchmark::{convergence_study, residual_oracle, chinosi_load, ExactSolution, StudyResult};
use dpg_plate::DpgError;

pub use config::{RunConfig, SolverChoice};
pub use fields::{emit_field_grid, FieldQuantity, FieldSampleGrid};
pub use output::{write_atomic, Artifacts};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(DpgError),
    #[error("exact solution rejected by the residual check: {0}")]
    Gate(DpgError),
    #[error("i/o error on `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Gate(_) => 4,
            CliError::Io { .. } => 1,
        }
    }
}

/// Grid resolution of the residual check on the exact fields.
pub const GATE_RESOLUTION: usize = 101;

/// Result of a study: the rate table, the text summary and optional field
/// grids, all still in memory.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub study: StudyResult,
    pub gate_residual: f64,
    pub artifacts: Artifacts,
}

/// Checks the exact fields, runs the study and renders every artifact.
/// Nothing is written to disk.
pub fn run_study(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let study_cfg = cfg.study()?;
    let material = study_cfg.material;
    let exact = ExactSolution::chinosi(material).map_err(|e| match e {
        DpgError::ResidualGate { .. } => CliError::Gate(e),
        other => CliError::Config(other.to_string()),
    })?;
    let nu = material.poisson;
    let gate_residual = residual_oracle(&exact, &|x, y| chinosi_load(x, y, nu), &material, GATE_RESOLUTION);

    let study = convergence_study(&study_cfg, &exact).map_err(CliError::Solver)?;

    let mut files = vec![
        ("errors.csv".to_string(), study.table.to_csv()),
        ("summary.txt".to_string(), {
            let mut s = study.summary(&study_cfg);
            s.push_str(&format!(
                "\nexact fields: max strong-form residual {gate_residual:.3e} on a {GATE_RESOLUTION}x{GATE_RESOLUTION} grid\n"
            ));
            s
        }),
    ];
    if cfg.emit_fields {
        if let Some((mesh, sol)) = &study.finest {
            for q in FieldQuantity::ALL {
                let grid = emit_field_grid(sol, mesh, q, cfg.resolution).map_err(CliError::Solver)?;
                files.push((format!("field_{}.csv", q.name()), grid.to_csv()));
            }
        }
    }
    Ok(RunOutcome {
        study,
        gate_residual,
        artifacts: Artifacts { files },
    })
}

/// Runs the study and writes its artifacts into `cfg.out`.
pub fn run_and_write(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let outcome = run_study(cfg)?;
    outcome.artifacts.write_to(&cfg.out)?;
    Ok(outcome)
}

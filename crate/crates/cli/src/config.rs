//! Run configuration: flat `key = value` files overridden by flags.

use std::path::{Path, PathBuf};

use dpg_plate::benchmark::StudyConfig;
use dpg_plate::{LinearSolver, MaterialParams, MeshKind};

use crate::CliError;

/// Everything a study run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub degree: usize,
    pub thickness: f64,
    pub poisson: f64,
    pub shear_correction: f64,
    pub mesh: MeshKind,
    pub distortion: f64,
    pub refinements: Vec<usize>,
    pub quad_points: Option<usize>,
    pub solver: SolverChoice,
    pub cg_tolerance: f64,
    pub cg_max_iterations: usize,
    pub out: PathBuf,
    pub emit_fields: bool,
    pub resolution: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Cholesky,
    Cg,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            degree: 1,
            thickness: 0.1,
            poisson: 0.3,
            shear_correction: 5.0 / 6.0,
            mesh: MeshKind::Uniform,
            distortion: 0.25,
            refinements: vec![4, 8, 16, 32, 64],
            quad_points: None,
            solver: SolverChoice::Cholesky,
            cg_tolerance: 1e-12,
            cg_max_iterations: 100_000,
            out: PathBuf::from("out"),
            emit_fields: false,
            resolution: 101,
        }
    }
}

/// Keys accepted in configuration files.
pub const KEYS: [&str; 14] = [
    "degree",
    "thickness",
    "poisson",
    "shear_correction",
    "mesh",
    "distortion",
    "refinements",
    "quad_points",
    "solver",
    "cg_tolerance",
    "cg_max_iterations",
    "out",
    "emit_fields",
    "resolution",
];

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("invalid value `{value}` for `{key}`: {why}"))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| bad(key, value, e))
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<usize>, CliError> {
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| parse_num::<usize>(key, s))
        .collect()
}

impl RunConfig {
    /// Applies one `key = value` setting. Keys use either `snake_case` or
    /// `kebab-case`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "degree" => self.degree = parse_num(&key, v)?,
            "thickness" => self.thickness = parse_num(&key, v)?,
            "poisson" => self.poisson = parse_num(&key, v)?,
            "shear_correction" => self.shear_correction = parse_num(&key, v)?,
            "mesh" => self.mesh = v.parse().map_err(|e| bad(&key, v, e))?,
            "distortion" => self.distortion = parse_num(&key, v)?,
            "refinements" => self.refinements = parse_list(&key, v)?,
            "quad_points" => {
                self.quad_points = match v {
                    "" | "auto" => None,
                    _ => Some(parse_num(&key, v)?),
                }
            }
            "solver" => {
                self.solver = match v {
                    "cholesky" => SolverChoice::Cholesky,
                    "cg" => SolverChoice::Cg,
                    _ => return Err(bad(&key, v, "expected cholesky|cg")),
                }
            }
            "cg_tolerance" => self.cg_tolerance = parse_num(&key, v)?,
            "cg_max_iterations" => self.cg_max_iterations = parse_num(&key, v)?,
            "out" => self.out = PathBuf::from(v),
            "emit_fields" => self.emit_fields = parse_num(&key, v)?,
            "resolution" => self.resolution = parse_num(&key, v)?,
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses configuration text on top of the defaults. Blank lines and
    /// `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: &str| Err(CliError::Config(m.to_string()));
        if self.degree < 1 {
            return fail("degree must be at least 1");
        }
        if let Err(e) = self.material() {
            return Err(CliError::Config(e.to_string()));
        }
        if self.refinements.is_empty() {
            return fail("refinements must not be empty");
        }
        if self.refinements[0] == 0 || self.refinements.windows(2).any(|w| w[0] >= w[1]) {
            return fail("refinements must be positive and strictly increasing");
        }
        if self.mesh == MeshKind::Trapezoidal && !(0.0..0.5).contains(&self.distortion) {
            return fail("distortion must lie in [0, 0.5)");
        }
        if self.quad_points == Some(0) {
            return fail("quad_points must be positive");
        }
        if self.resolution < 2 {
            return fail("resolution must be at least 2");
        }
        if !(self.cg_tolerance > 0.0) || self.cg_max_iterations == 0 {
            return fail("cg_tolerance and cg_max_iterations must be positive");
        }
        Ok(())
    }

    pub fn material(&self) -> dpg_plate::Result<MaterialParams> {
        MaterialParams::new(self.thickness, self.poisson, self.shear_correction)
    }

    pub fn study(&self) -> Result<StudyConfig, CliError> {
        self.validate()?;
        Ok(StudyConfig {
            degree: self.degree,
            material: self.material().map_err(|e| CliError::Config(e.to_string()))?,
            mesh_kind: self.mesh,
            distortion: self.distortion,
            refinements: self.refinements.clone(),
            solver: match self.solver {
                SolverChoice::Cholesky => LinearSolver::Cholesky,
                SolverChoice::Cg => LinearSolver::ConjugateGradient {
                    tolerance: self.cg_tolerance,
                    max_iterations: self.cg_max_iterations,
                },
            },
            quad_points: self.quad_points,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = RunConfig::from_text("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.degree, 1);
        assert_eq!(cfg.thickness, 0.1);
        assert_eq!(cfg.poisson, 0.3);
        assert_eq!(cfg.shear_correction, 5.0 / 6.0);
        assert_eq!(cfg.mesh, MeshKind::Uniform);
        assert_eq!(cfg.refinements, vec![4, 8, 16, 32, 64]);
    }

    #[test]
    fn comments_and_kebab_keys() {
        let cfg = RunConfig::from_text("# study\nthickness = 0.001 # thin\nshear-correction=1\nrefinements = 2, 4\n").unwrap();
        assert_eq!(cfg.thickness, 0.001);
        assert_eq!(cfg.shear_correction, 1.0);
        assert_eq!(cfg.refinements, vec![2, 4]);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = RunConfig::from_text("thicknes = 0.1").unwrap_err();
        assert!(err.to_string().contains("thicknes"));
    }

    #[test]
    fn malformed_value_names_key() {
        let err = RunConfig::from_text("degree = two").unwrap_err();
        assert!(err.to_string().contains("degree"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        cfg.degree = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.refinements = vec![8, 4];
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.thickness = 0.0;
        assert!(cfg.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }
}

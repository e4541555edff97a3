//! Discontinuous Petrov–Galerkin solver with optimal test functions for the
//! Reissner–Mindlin plate on quadrilateral meshes of the unit square.
//!
//! The unknowns are the shear force `V`, bending moment `M`, deflection `w`,
//! rotation `ψ` and vorticity scalar `r` inside elements, plus the skeleton
//! traces `ŵ`, `ψ̂`, `V̂_n`, `M̂_n`. Test functions are computed element by
//! element from an enriched space of degree `p + 3`.

pub mod basis;
pub mod benchmark;
pub mod dpg;
pub mod error;
pub mod material;
pub mod mesh;
pub mod polynomials;
pub mod quadrature;

pub use dpg::{DpgConfig, DpgSolver, FieldValues, LinearSolver, Solution, SolutionFields, Sources};
pub use error::{DpgError, Result};
pub use material::{compliance, compliance_inverse, MaterialParams, Tensor2};
pub use mesh::{generate_mesh, Mesh, MeshKind};

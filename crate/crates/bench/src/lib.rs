//! Shared fixtures for the criterion benchmarks.

use dpg_plate::{generate_mesh, DpgConfig, MaterialParams, Mesh, MeshKind};

/// Trapezoidal `n × n` mesh with the default distortion.
pub fn trapezoidal_mesh(n: usize) -> Mesh {
    generate_mesh(n, MeshKind::Trapezoidal, 0.25).expect("valid mesh parameters")
}

pub fn plate(thickness: f64) -> MaterialParams {
    MaterialParams::new(thickness, 0.3, 5.0 / 6.0).expect("valid material")
}

pub fn config(degree: usize) -> DpgConfig {
    DpgConfig::with_degree(degree)
}

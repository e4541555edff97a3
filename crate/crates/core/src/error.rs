use thiserror::Error;

#[derive(Debug, Error)]
pub enum DpgError {
    #[error("invalid mesh parameters: {0}")]
    InvalidMesh(String),

    #[error("non-convex element {elem}: cross product {cross:e} at vertex {vertex}")]
    NonConvexElement { elem: usize, vertex: usize, cross: f64 },

    #[error("edge {edge} is not adjacent to element {elem}")]
    EdgeNotAdjacent { edge: usize, elem: usize },

    #[error("singular geometry in element {elem}: det J = {det:e}")]
    SingularGeometry { elem: usize, det: f64 },

    #[error("invalid material parameters: {0}")]
    InvalidMaterial(String),

    #[error("invalid discretization: {0}")]
    InvalidDiscretization(String),

    #[error("test Gram matrix of element {elem} is not positive definite ({block} block)")]
    IndefiniteGram { elem: usize, block: &'static str },

    #[error("interior block of element {elem} is singular; check the enrichment degree")]
    SingularInterior { elem: usize },

    #[error("global index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("global factorization failed: {0}")]
    Factorization(String),

    #[error("solver did not converge: relative residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("exact fields fail the strong-form residual check: max residual {residual:e} > {tolerance:e}")]
    ResidualGate { residual: f64, tolerance: f64 },

    #[error("exact {quantity} has zero norm")]
    ZeroExactNorm { quantity: &'static str },

    #[error("point ({x}, {y}) is not contained in any element")]
    PointLocation { x: f64, y: f64 },
}

pub type Result<T, E = DpgError> = std::result::Result<T, E>;

//! The clamped square plate benchmark: exact fields, `L2` errors and
//! convergence studies.

pub mod errors;
pub mod exact;
pub mod poly;
pub mod study;

pub use errors::{l2_errors, l2_projection, ErrorReport, Quantity, QuantityError};
pub use exact::{
    chinosi_load, interior_grid, residual_components, residual_oracle, ExactSolution, PlateField, StrongResiduals,
    CHINOSI_GATE,
};
pub use poly::Poly2;
pub use study::{convergence_study, RateRow, RateTable, StudyConfig, StudyResult};

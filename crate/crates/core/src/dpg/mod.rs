//! The DPG discretization: element forms, optimal test functions through
//! local Gram solves, static condensation and the global skeleton solve.

pub mod condense;
pub mod element;
pub mod global;
pub mod layout;
pub mod solver;
pub mod tables;

pub use condense::{condense_element, condense_normal, condense_whitened, energy_residual, normal_equations, CondensedElement, NormalEquations, Recovery};
pub use element::{element_b_matrix, element_gram, element_load, element_system, ElementSystem, GramBlocks, GramFactors, Sources};
pub use global::{assemble_global, factor_global, solve_global, GlobalFactor, GlobalSystem, LinearSolver};
pub use layout::{SkeletonCounts, SkeletonNumbering, TestLayout, TrialLayout};
pub use solver::{DpgConfig, DpgSolver, FieldValues, Solution, SolutionFields};
pub use tables::ReferenceTables;

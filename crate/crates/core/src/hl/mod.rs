//! The Harvey–Lawson equation for associative graphs `R^3 → R^4`.

pub mod grid;
pub mod solver;
pub mod spline;

pub use grid::{BoundaryData, BoundaryFamily, GraphGrid};
pub use solver::{
    dirac_residual, gmres, residual_sup_norm, solve_graph, solve_unit_box, sup_norm, SolveOutcome,
    SolverConfig,
};
pub use spline::{graph_point, graph_to_patch, GraphPatch, TensorSpline};

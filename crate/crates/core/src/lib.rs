//! Numerical workbench for associative 3-folds in flat `R^7`.

// index loops mirror the tensor formulas; `!(x > 0.0)` also rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod g2;
pub mod geom;
pub mod hl;
pub mod spin4;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

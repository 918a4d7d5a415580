//! Driver for the `assoc` command-line tool: self-check suites, the sampled
//! verification pipeline, the graph solver and report export.

pub mod checks;
pub mod config;
pub mod error;
pub mod report;
pub mod solve;
pub mod verify;

pub use error::{CliError, CliResult};

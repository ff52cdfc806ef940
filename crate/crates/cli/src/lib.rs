//! Command-line front end for the `plap-core` solvers: single runs on
//! balls, intervals and the unit square, sweeps over `p`, and `q -> p`
//! convergence studies, written as CSV or JSON lines.

pub mod args;
pub mod commands;
pub mod error;
pub mod record;

pub use args::Cli;
pub use commands::run;
pub use error::CliError;
pub use record::{Geometry, RunRecord};

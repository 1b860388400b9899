//! File formats, threaded scans and the command line for `arithplane-core`.

pub mod cli;
pub mod config;
pub mod expr;
pub mod report;
pub mod runner;

pub use config::{load_lattice_file, parse_lattice};
pub use expr::parse_expr;
pub use runner::Threaded;

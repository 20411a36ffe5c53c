//! Command-line front end: system files, catalog access, analyses and sweeps,
//! with text and JSON reports.

mod commands;
pub mod file;
pub mod report;

pub use commands::{parse_symbol, run, tolerance, Cli, Outcome, TOL_ENV};
pub use file::SystemFile;
pub use report::{CliError, Report, Status, EXIT_INVARIANT, EXIT_PARSE, EXIT_UNCERTIFIED};

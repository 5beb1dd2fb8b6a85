//! Library half of the command-line tool: run configuration, verification
//! suites and the command implementations, kept out of `main` so integration
//! tests can drive them directly.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

pub use config::{RunConfig, ScalarMode};
pub use report::{CheckLine, SuiteReport};

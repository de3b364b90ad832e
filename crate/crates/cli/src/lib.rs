//! Problem files, command dispatch and reports for the `eqsteenrod` binary.

pub mod commands;
pub mod error;
pub mod problem;
pub mod report;

pub use commands::{required_top_dim, run, selftest, Command};
pub use error::{CliError, CliResult};
pub use problem::ProblemFile;
pub use report::{emit, Format, Report};

//! Command-line front end: run specs, reports and the check suites behind
//! the `csgrav` binary.

pub mod checks;
pub mod error;
pub mod report;
pub mod run;
pub mod spec;

pub use error::{CliError, CliResult};
pub use report::{CheckRecord, History, Report, Status};
pub use run::{run, Outcome};
pub use spec::{Command, FieldSpec, RunSpec, SolverSpec};

//! Problem files, command dispatch and output for the `ipset` binary.

pub mod emit;
pub mod error;
pub mod run;
pub mod spec;

pub use emit::{emit, Format};
pub use error::{CliError, CliResult};
pub use run::{run, Command, CommandResult, Flags, ResultBundle};
pub use spec::{parse_problem, parse_problem_str, ProblemSpec};

//! Command runners behind the `npure` binary. Each runner returns a
//! [`report::MachineReport`]; the binary renders it and exits with
//! [`report::MachineReport::exit_code`].

pub mod commands;
pub mod problem;
pub mod report;
pub mod suite;

use thiserror::Error;

/// Errors that end a command with exit code 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("check `{check}`: {reason}")]
    Check { check: String, reason: String },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub use commands::{run_check, run_enumerate, run_maximal_pure, run_mine, run_scan, Options};
pub use problem::ProblemDescription;
pub use report::{Format, MachineReport, EXIT_FAILS, EXIT_HOLDS, EXIT_INPUT, EXIT_UNKNOWN};
pub use suite::{paper_suite_cases, run_paper_suite, Expected, SuiteCase};

//! Document language, command dispatch and reports for the `nambu` binary.

pub mod commands;
pub mod dsl;

pub use commands::{execute, run, Cli, Command, Outcome, Report};
pub use dsl::{parse, DslDocument, Object};

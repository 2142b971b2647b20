//! The `codo` command-line tool: a persisted workspace, the pipeline
//! commands and the query endpoint.

pub mod commands;
pub mod server;
pub mod workspace;

pub use commands::{run, Cli, Command};

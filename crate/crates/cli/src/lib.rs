//! Library side of the `cograte` binary: value parsing and subcommands.

pub mod commands;
pub mod config;

pub use commands::{CliError, FailureKind, Format};

//! Command-line orchestration for the group-quantization workbench:
//! subcommands, deterministic JSON/CSV reports and the acceptance suite.

pub mod commands;
pub mod report;
pub mod selftest;

pub use commands::{execute, Cli};

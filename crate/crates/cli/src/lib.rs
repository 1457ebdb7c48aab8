//! Command-line experiment harness around `negspan-core`.

pub mod chart;
pub mod commands;
pub mod error;
pub mod experiment;
pub mod render;
pub mod sweep;

pub use commands::{run, Cli, Command};
pub use error::{HarnessError, Result};

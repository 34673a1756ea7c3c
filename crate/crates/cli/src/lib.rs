//! Library side of the `qstancu` command-line tool: run configuration,
//! the five commands and the CSV/JSON writers.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::run;
pub use config::{Command, Format, RunConfig};

//! Command-line front end of the `cosparse` library.

pub mod commands;
pub mod exit;
pub mod instance;

pub use commands::{run, Cli};

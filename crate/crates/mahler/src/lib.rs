//! Input parsing, JSON formats, text rendering and the command-line driver.

pub mod cli;
pub mod error;
pub mod json;
pub mod parse;
pub mod render;

pub use error::CliError;

//! Job-file parsing, command dispatch and plotting for the `charpoly` binary.

pub mod commands;
pub mod error;
pub mod job;
pub mod plot;

pub use error::{CliError, Result};

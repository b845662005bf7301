//! Library side of the `tpo` command-line tool: file formats and the
//! operations behind each subcommand.

pub mod commands;
pub mod error;
pub mod formats;

pub use error::{CliError, EXIT_INPUT_ERROR, EXIT_OK, EXIT_VIOLATIONS};

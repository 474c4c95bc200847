//! Command-line front end for `diagsum`: model and tensor files, JSON
//! reports, CSV bound tables and seeded verification campaigns.
//!
//! Exit status: 0 on success, 1 when a checked inequality fails, 2 on bad
//! input.

pub mod commands;
pub mod error;
pub mod model_file;
pub mod output;
pub mod tensor_file;
pub mod verify;

pub use commands::{run, Cli, Command};
pub use error::CliError;

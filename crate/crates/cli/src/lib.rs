//! Command-line front end for `shellmodes-core`: argument parsing, the
//! thread-pool executor, profile files and the JSON/CSV outputs.

pub mod args;
pub mod commands;
pub mod error;
pub mod exec;
pub mod io;

pub use error::{CliError, ExitStatus};
pub use exec::RayonExecutor;

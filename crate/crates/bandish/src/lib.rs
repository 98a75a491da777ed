//! Dataset IO, file formats and the command pipeline around
//! [`bandish_core`].

pub mod commands;
pub mod dataset;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod svg;
pub mod synth;

pub use commands::RunConfig;
pub use error::{CliError, ExitClass, Result};

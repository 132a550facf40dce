//! Command-line front end: synthetic benchmarks, bound checks, image
//! compression, LSI scoring and robust PCA, with matrix and image I/O and
//! replayable run manifests.

pub mod cli;
pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;

pub use commands::{execute, run, Outcome, Status};
pub use error::{CliError, CliResult};

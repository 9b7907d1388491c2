//! Library half of the `quad-eit` binary: config schema, command
//! implementations, and the error-to-exit-code mapping. Kept as a lib so the
//! integration tests can drive the same code paths the binary uses.

pub mod commands;
pub mod config;

mod error;

pub use error::CliError;

//! Command-line front-end for `corrwork-core`: figure reproduction,
//! parameter sweeps, protocol demos and verification suites.

pub mod args;
pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod figure1;
pub mod svg;
pub mod sweep;
pub mod verify;

pub use error::{CliError, Result};

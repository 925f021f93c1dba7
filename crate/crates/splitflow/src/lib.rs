//! Benchmark harness, file formats and command-line front end for
//! `splitflow-core`.

pub mod bench;
pub mod cli;
pub mod error;
pub mod formats;

pub use error::{Error, Result};

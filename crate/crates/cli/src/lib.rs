//! File formats, thread-parallel chain execution and the command-line
//! surface over `auction_bids_core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod io;
pub mod parallel;

pub use error::{CliError, CliResult};

//! File formats, configuration, caching and the command pipeline on top
//! of `potlab-core`.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;

pub use commands::Run;
pub use config::RunConfig;
pub use error::{Error, Result};

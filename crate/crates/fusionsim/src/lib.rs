//! Experiments, file formats and command-line driver around
//! [`fusionsim_core`].

pub mod config;
pub mod error;
pub mod experiments;
pub mod oracles;
pub mod output;
pub mod table;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};

//! Plot-ready datasets, parameter sweeps and the verification report for the
//! two-atom qutrit entanglement protocol.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;
pub mod verify;

pub use config::{Grid, Overrides, RunConfig};
pub use error::{Error, Result};
pub use output::Table;
